#include "cflow/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cflow {

namespace {

void check_distribution(std::span<const double> p, double tol, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(what + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument(what + " sums to " + std::to_string(total) + ", not 1");
  }
}

}  // namespace

Model::Model(InputDistribution mu, Channel nu, std::optional<Partition> gamma, ModelOptions options)
    : mu_(std::move(mu)),
      nu_(std::move(nu)),
      gamma_(gamma ? std::move(*gamma) : Partition::singletons(nu_.out.size())),
      options_(options) {
  if (!(mu_.space == nu_.space)) throw std::invalid_argument("mu and nu are defined on different input spaces");
  if (!(options_.tol >= 0.0) || !(options_.normalization_tol >= 0.0)) {
    throw std::invalid_argument("tolerances must be non-negative");
  }
  const std::size_t nx = mu_.space.size();
  const std::size_t nz = nu_.out.size();
  if (mu_.prob.size() != nx) throw std::invalid_argument("mu has the wrong number of entries");
  if (nu_.rows.size() != nx * nz) throw std::invalid_argument("nu has the wrong shape");
  if (gamma_.size() != nz) throw std::invalid_argument("gamma is not a partition of the output set");
  check_distribution(mu_.prob, options_.normalization_tol, "mu");
  for (std::size_t x = 0; x < nx; ++x) {
    check_distribution(nu_row(x), options_.normalization_tol,
                       "channel row " + mu_.space.label(x, mu_.space.all()));
  }
  const std::size_t k = num_outcomes();
  gamma_rows_.assign(nx * k, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const auto row = nu_row(x);
    for (std::size_t z = 0; z < nz; ++z) {
      gamma_rows_[x * k + static_cast<std::size_t>(gamma_.block_of(z))] += row[z];
    }
  }
}

std::span<const double> Model::nu_row(std::size_t x) const {
  const std::size_t nz = nu_.out.size();
  return std::span<const double>(nu_.rows).subspan(x * nz, nz);
}

std::span<const double> Model::gamma_row(std::size_t x) const {
  const std::size_t k = num_outcomes();
  return std::span<const double>(gamma_rows_).subspan(x * k, k);
}

std::vector<double> pushforward(const Model& model) {
  std::vector<double> out(model.output().size(), 0.0);
  for (std::size_t x = 0; x < model.space().size(); ++x) {
    const auto row = model.nu_row(x);
    for (std::size_t z = 0; z < out.size(); ++z) out[z] += model.mu(x) * row[z];
  }
  return out;
}

std::vector<double> pushforward_blocks(const Model& model) {
  std::vector<double> out(model.num_outcomes(), 0.0);
  for (std::size_t x = 0; x < model.space().size(); ++x) {
    const auto row = model.gamma_row(x);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += model.mu(x) * row[c];
  }
  return out;
}

std::vector<double> input_marginal(const Model& model, Subset m) {
  const auto& space = model.space();
  std::vector<double> out(space.size(m), 0.0);
  const auto proj = space.projection_map(space.all(), m);
  for (std::size_t x = 0; x < proj.size(); ++x) out[proj[x]] += model.mu(x);
  return out;
}

HatKernel classical_marginal(const Model& model, Subset m) {
  return hat_marginal(model, m, Partition::singletons(model.space().size(m)));
}

HatKernel hat_marginal(const Model& model, Subset m, const Partition& conditioning) {
  const auto& space = model.space();
  if (conditioning.size() != space.size(m)) {
    throw std::invalid_argument("hat_marginal: conditioning partition is not over X_M");
  }
  HatKernel kernel{m, conditioning, model.num_outcomes(), {}, {}};
  const std::size_t atoms = static_cast<std::size_t>(conditioning.num_blocks());
  const std::size_t k = kernel.num_outcomes;
  kernel.atom_mass.assign(atoms, 0.0);
  kernel.table.assign(atoms * k, 0.0);

  // Accumulate P(atom, C) over the full joint table, then normalize by P(atom).
  const auto proj = space.projection_map(space.all(), m);
  for (std::size_t x = 0; x < proj.size(); ++x) {
    const double w = model.mu(x);
    if (w == 0.0) continue;
    const auto atom = static_cast<std::size_t>(conditioning.block_of(proj[x]));
    kernel.atom_mass[atom] += w;
    const auto row = model.gamma_row(x);
    for (std::size_t c = 0; c < k; ++c) kernel.table[atom * k + c] += w * row[c];
  }
  for (std::size_t a = 0; a < atoms; ++a) {
    const double mass = kernel.atom_mass[a];
    for (std::size_t c = 0; c < k; ++c) {
      kernel.table[a * k + c] = mass > 0.0 ? kernel.table[a * k + c] / mass : 0.0;
    }
  }
  return kernel;
}

}  // namespace cflow
