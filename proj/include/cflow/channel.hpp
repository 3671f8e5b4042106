#pragma once

// The probabilistic model: an input distribution over a product space, a
// row-stochastic channel to a finite output set, and the output partition at
// whose resolution all quantities are evaluated.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cflow/partition.hpp"

namespace cflow {

struct InputDistribution {
  ProductSpace space;
  std::vector<double> prob;  // indexed over X_N
};

struct Channel {
  ProductSpace space;
  FiniteSet out;
  std::vector<double> rows;  // |X_N| x |Z|, row-major
};

struct ModelOptions {
  /// Row-equality tolerance used when comparing channel rows.
  double tol = 1e-9;
  /// Allowed deviation of any distribution from total mass 1.
  double normalization_tol = 1e-12;
};

/// Immutable (mu, nu, gamma) triple. Construction validates every invariant.
class Model {
 public:
  /// `gamma` defaults to the singleton partition of the output set.
  Model(InputDistribution mu, Channel nu, std::optional<Partition> gamma = std::nullopt,
        ModelOptions options = {});

  const ProductSpace& space() const { return mu_.space; }
  const FiniteSet& output() const { return nu_.out; }
  std::span<const double> mu() const { return mu_.prob; }
  double mu(std::size_t x) const { return mu_.prob[x]; }
  std::span<const double> nu_row(std::size_t x) const;
  const Partition& gamma() const { return gamma_; }
  std::size_t num_outcomes() const { return static_cast<std::size_t>(gamma_.num_blocks()); }
  /// nu(x; C) for each gamma-block C.
  std::span<const double> gamma_row(std::size_t x) const;
  double tol() const { return options_.tol; }
  const ModelOptions& options() const { return options_; }
  /// True when gamma is coarser than the singletons of Z.
  bool gamma_resolved() const { return !gamma_.is_discrete(); }

  const InputDistribution& input_distribution() const { return mu_; }
  const Channel& channel() const { return nu_; }

 private:
  InputDistribution mu_;
  Channel nu_;
  Partition gamma_;
  ModelOptions options_;
  std::vector<double> gamma_rows_;
};

/// Output-side conditional distribution indexed by the atoms of a partition of
/// X_M. Atoms of zero input mass carry no distribution.
struct HatKernel {
  Subset subset;
  Partition conditioning;
  std::size_t num_outcomes = 0;   // gamma blocks
  std::vector<double> atom_mass;  // mu_M mass of each atom
  std::vector<double> table;      // atoms x gamma blocks

  bool defined(int atom) const { return atom_mass[static_cast<std::size_t>(atom)] > 0.0; }
  std::span<const double> row(int atom) const {
    return std::span<const double>(table).subspan(static_cast<std::size_t>(atom) * num_outcomes,
                                                  num_outcomes);
  }
  /// Distribution attached to the atom containing x_M.
  std::span<const double> at(std::size_t x_m) const { return row(conditioning.block_of(x_m)); }
  bool defined_at(std::size_t x_m) const { return defined(conditioning.block_of(x_m)); }
};

/// mu*(z) = sum_x mu(x) nu(x; z), over the elements of Z.
std::vector<double> pushforward(const Model& model);
/// mu*(C) over the gamma blocks.
std::vector<double> pushforward_blocks(const Model& model);

/// mu_M over X_M; M = {} gives the unit mass on the empty sequence.
std::vector<double> input_marginal(const Model& model, Subset m);

/// nu_M(x_M; C), conditioned on the singletons of X_M.
HatKernel classical_marginal(const Model& model, Subset m);

/// nu-hat(A; C): the output distribution given the atom A of `conditioning`
/// containing x_M. Singletons give classical_marginal, the trivial partition
/// gives the push-forward.
HatKernel hat_marginal(const Model& model, Subset m, const Partition& conditioning);

}  // namespace cflow
