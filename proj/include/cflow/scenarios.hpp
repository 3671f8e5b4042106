#pragma once

// Parametrized builders for the worked examples (copy channel, transfer
// entropy Markov step, integer sum channel), their closed forms, seeded random
// models, and beta sweeps.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cflow/channel.hpp"

namespace cflow {

/// Inputs X, Y in {-1,+1} with mu(x,y) ∝ exp(beta x y); Z is a copy of Y.
Model build_copy(double beta);

struct CopyClosedForms {
  double i_xz;                // I(X;Z)
  double i_yz_given_x;        // I(Y;Z|X)
  double i_x_to_z;            // I(X -> Z)
  double i_y_to_z_given_x;    // I(Y -> Z | X)
  double i_yz;                // I(Y;Z)
  double i_xz_given_y;        // I(X;Z|Y)
};
CopyClosedForms analytic_copy(double beta);

/// Stationary law of the two-spin chain: p(+,+) = p(-,-) = 1/2 - ab,
/// p(+,-) = p(-,+) = ab with a = 1/(1+e^{2β}), b = 1/(1+e^{-2β}).
struct TransferStationary {
  double a;
  double b;
  double same;       // p(+1,+1) = p(-1,-1)
  double different;  // p(+1,-1) = p(-1,+1)
};
TransferStationary transfer_stationary(double beta);

/// Largest |(mu P)(s) - mu(s)| of the stationary law under the full
/// (x, y) -> (x', y') transition matrix.
double transfer_stationarity_residual(double beta);

/// One Markov step: inputs (X, Y) = (X_{m-1}, Y_{m-1}) under the stationary
/// law, output X' = X_m with p(x'|x,y) = 1/(1 + e^{2β x' y}).
/// Throws std::runtime_error if the stationarity residual exceeds 1e-8.
Model build_transfer(double beta);

struct TransferReport {
  double classical_cmi;  // I(Y;X'|X)
  double causal_flow;    // I(Y -> X' | X), extension family
  double mutual_info;    // I(Y;X')
};
TransferReport transfer_report(double beta);

/// Integer sum channel: X_i in {0..k-1}, Z = X_1 + ... + X_n.
/// `mu` defaults to uniform; kⁿ is capped at 2^20 states.
Model build_sum(int n, int k, std::optional<std::vector<double>> mu = std::nullopt);
/// Sum channel with mu(x) ∝ exp(beta * #{i<j : x_i = x_j}); beta = 0 is uniform.
Model build_sum_coupled(int n, int k, double beta);

struct RandomModelOptions {
  int n = 3;
  int max_alphabet = 3;  // |X_i| drawn from 2..max_alphabet
  int max_output = 3;    // |Z| drawn from 2..max_output
};

/// Random model with a Dirichlet(1,...,1) input law. Channel rows are
/// Dirichlet(1,...,1) draws from a pool shared across inputs, and with
/// probability 1/3 the channel ignores a random nonempty set of factors, so
/// traces are nontrivial. Deterministic for a given generator state.
Model random_model(std::mt19937_64& rng, const RandomModelOptions& options);

/// The fixed corpus used by the randomized checks: `count` models from `seed`,
/// with n cycling through `ns`.
std::vector<Model> random_corpus(std::uint64_t seed, int count, const std::vector<int>& ns,
                                 int max_alphabet = 3, int max_output = 3);

struct SweepRow {
  double beta;
  std::string quantity;
  double value;
};

/// Quantities available per scenario id ("copy", "transfer", "sum").
std::vector<std::string> sweep_quantities(const std::string& scenario);

/// Evaluates the requested quantities (all, if empty) at every beta.
/// For "sum", `n` and `k` set the shape and beta couples the inputs.
std::vector<SweepRow> sweep(const std::string& scenario, const std::vector<double>& betas,
                            const std::vector<std::string>& quantities, int n = 3, int k = 2);

}  // namespace cflow
