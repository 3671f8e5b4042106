#include "cflow/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cflow/measures.hpp"
#include "cflow/sigma.hpp"

namespace cflow {

namespace {

FiniteSet spins() { return FiniteSet({"-1", "+1"}); }
double spin(std::size_t index) { return index == 0 ? -1.0 : 1.0; }

/// 1 / (1 + e^t) without overflow.
double logistic_complement(double t) {
  if (t > 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

/// log(1 + e^t) / (1 + e^t) without overflow.
double log_ratio_term(double t) {
  const double softplus = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  return softplus * logistic_complement(t);
}

void check_beta(double beta) {
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// Copy channel

Model build_copy(double beta) {
  check_beta(beta);
  ProductSpace space({"X", "Y"}, {spins(), spins()});
  std::vector<double> mu(4);
  double total = 0.0;
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 0; x < 2; ++x) {
      // Shifted by |beta| so that large couplings do not overflow.
      const double w = std::exp(beta * spin(x) * spin(y) - std::abs(beta));
      mu[x + 2 * y] = w;
      total += w;
    }
  }
  for (double& v : mu) v /= total;

  std::vector<double> rows(4 * 2, 0.0);
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 0; x < 2; ++x) rows[(x + 2 * y) * 2 + y] = 1.0;
  }
  return Model({space, std::move(mu)}, {space, spins(), std::move(rows)});
}

CopyClosedForms analytic_copy(double beta) {
  check_beta(beta);
  const double ln2 = std::numbers::ln2;
  const double ghost = log_ratio_term(2 * beta) + log_ratio_term(-2 * beta);
  return {ln2 - ghost, ghost, 0.0, ln2, ln2, 0.0};
}

// ---------------------------------------------------------------------------
// Transfer entropy chain

TransferStationary transfer_stationary(double beta) {
  check_beta(beta);
  const double a = logistic_complement(2 * beta);
  const double b = logistic_complement(-2 * beta);
  return {a, b, 0.5 - a * b, a * b};
}

namespace {

/// p(s' | y) for a spin s' driven by y: 1 / (1 + e^{2β s' y}).
double spin_transition(double beta, double next, double y) { return logistic_complement(2 * beta * next * y); }

std::vector<double> stationary_vector(const TransferStationary& st) {
  // Index x + 2y with spin 0 = -1, 1 = +1.
  return {st.same, st.different, st.different, st.same};
}

}  // namespace

double transfer_stationarity_residual(double beta) {
  const auto mu = stationary_vector(transfer_stationary(beta));
  double worst = 0.0;
  for (std::size_t s2 = 0; s2 < 4; ++s2) {
    const double x2 = spin(s2 % 2), y2 = spin(s2 / 2);
    double mass = 0.0;
    for (std::size_t s1 = 0; s1 < 4; ++s1) {
      const double y1 = spin(s1 / 2);
      mass += mu[s1] * spin_transition(beta, x2, y1) * spin_transition(beta, y2, y1);
    }
    worst = std::max(worst, std::abs(mass - mu[s2]));
  }
  return worst;
}

Model build_transfer(double beta) {
  const auto st = transfer_stationary(beta);
  const double residual = transfer_stationarity_residual(beta);
  if (residual > 1e-8) {
    throw std::runtime_error("transfer scenario: stationarity residual " + std::to_string(residual));
  }
  ProductSpace space({"X", "Y"}, {spins(), spins()});
  std::vector<double> rows(4 * 2);
  for (std::size_t s = 0; s < 4; ++s) {
    const double y = spin(s / 2);
    for (std::size_t next = 0; next < 2; ++next) rows[s * 2 + next] = spin_transition(beta, spin(next), y);
  }
  return Model({space, stationary_vector(st)}, {space, spins(), std::move(rows)});
}

TransferReport transfer_report(double beta) {
  const Model model = build_transfer(beta);
  const Subset all = model.space().all();
  const Subset x = Subset::of({0});
  const Subset y = Subset::of({1});
  const PartitionFamily ext = projective_extension(model);
  return {classical_cmi(model, all, x), information_flow(model, ext, all, x), mutual_information(model, y)};
}

// ---------------------------------------------------------------------------
// Sum channel

Model build_sum(int n, int k, std::optional<std::vector<double>> mu) {
  if (n < 2 || k < 2) throw std::invalid_argument("sum scenario needs n >= 2 and k >= 2");
  if (n > kMaxFactors) throw std::invalid_argument("sum scenario: too many inputs");
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) {
    states *= static_cast<std::size_t>(k);
    if (states > (std::size_t{1} << 20)) throw std::invalid_argument("sum scenario: resource cap exceeded (k^n > 2^20)");
  }
  ProductSpace space(std::vector<FiniteSet>(static_cast<std::size_t>(n), FiniteSet::indexed(static_cast<std::size_t>(k))));
  const std::size_t outputs = static_cast<std::size_t>(n * (k - 1) + 1);
  std::vector<double> rows(states * outputs, 0.0);
  for (std::size_t x = 0; x < states; ++x) {
    std::size_t sum = 0;
    for (std::size_t d : space.digits(x, space.all())) sum += d;
    rows[x * outputs + sum] = 1.0;
  }
  std::vector<double> law = mu ? std::move(*mu) : std::vector<double>(states, 1.0 / static_cast<double>(states));
  return Model({space, std::move(law)}, {space, FiniteSet::indexed(outputs), std::move(rows)});
}

Model build_sum_coupled(int n, int k, double beta) {
  check_beta(beta);
  if (n < 2 || k < 2 || n > kMaxFactors) throw std::invalid_argument("sum scenario needs 2 <= n <= 12 and k >= 2");
  const Model shape = build_sum(n, k);
  const auto& space = shape.space();
  std::vector<double> energy(space.size());
  for (std::size_t x = 0; x < energy.size(); ++x) {
    const auto d = space.digits(x, space.all());
    int equal_pairs = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) equal_pairs += d[i] == d[j];
    }
    energy[x] = beta * equal_pairs;
  }
  const double top = *std::max_element(energy.begin(), energy.end());
  std::vector<double> mu(energy.size());
  double total = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) total += mu[x] = std::exp(energy[x] - top);
  for (double& v : mu) v /= total;
  return build_sum(n, k, std::move(mu));
}

// ---------------------------------------------------------------------------
// Random models

namespace {

std::vector<double> dirichlet_ones(std::mt19937_64& rng, std::size_t size) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> out(size);
  double total = 0.0;
  for (double& v : out) total += v = draw(rng);
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

Model random_model(std::mt19937_64& rng, const RandomModelOptions& options) {
  if (options.n < 1 || options.n > kMaxFactors) throw std::invalid_argument("random_model: bad factor count");
  if (options.max_alphabet < 2 || options.max_output < 2) throw std::invalid_argument("random_model: alphabets need >= 2 states");
  std::uniform_int_distribution<int> alphabet(2, options.max_alphabet);
  std::vector<FiniteSet> factors;
  for (int i = 0; i < options.n; ++i) factors.push_back(FiniteSet::indexed(static_cast<std::size_t>(alphabet(rng))));
  const auto outputs = static_cast<std::size_t>(std::uniform_int_distribution<int>(2, options.max_output)(rng));
  ProductSpace space(std::move(factors));
  const std::size_t states = space.size();

  auto mu = dirichlet_ones(rng, states);

  Subset relevant = space.all();
  if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
    relevant = Subset(std::uniform_int_distribution<std::uint32_t>(1, space.all().bits())(rng));
  }
  const std::size_t keys = space.size(relevant);
  const auto pool_size = std::uniform_int_distribution<std::size_t>(1, keys)(rng);
  std::vector<std::vector<double>> pool;
  for (std::size_t p = 0; p < pool_size; ++p) pool.push_back(dirichlet_ones(rng, outputs));
  std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
  std::vector<std::size_t> assignment(keys);
  for (auto& a : assignment) a = pick(rng);

  const auto key_of = space.projection_map(space.all(), relevant);
  std::vector<double> rows(states * outputs);
  for (std::size_t x = 0; x < states; ++x) {
    const auto& row = pool[assignment[key_of[x]]];
    std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::ptrdiff_t>(x * outputs));
  }
  return Model({space, std::move(mu)}, {space, FiniteSet::indexed(outputs), std::move(rows)});
}

std::vector<Model> random_corpus(std::uint64_t seed, int count, const std::vector<int>& ns, int max_alphabet,
                                 int max_output) {
  if (ns.empty()) throw std::invalid_argument("random_corpus: no factor counts given");
  std::mt19937_64 rng(seed);
  std::vector<Model> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RandomModelOptions options{ns[static_cast<std::size_t>(i) % ns.size()], max_alphabet, max_output};
    out.push_back(random_model(rng, options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<std::string> sweep_quantities(const std::string& scenario) {
  if (scenario == "copy") {
    return {"I_XZ", "I_YZ_given_X", "I_X_to_Z", "I_Y_to_Z_given_X", "I_XY_Z", "I_XZ_closed_form",
            "I_YZ_given_X_closed_form"};
  }
  if (scenario == "transfer") return {"I_YXp_given_X", "I_Y_to_Xp_given_X", "I_YXp"};
  if (scenario == "sum") {
    return {"I_XN_Z", "I_X1_Z", "extension_X1_to_Z", "reduction_X1_to_Z", "extension_Xn_to_Z_given_rest",
            "reduction_Xn_to_Z_given_rest"};
  }
  throw std::invalid_argument("unknown scenario '" + scenario + "'");
}

std::vector<SweepRow> sweep(const std::string& scenario, const std::vector<double>& betas,
                            const std::vector<std::string>& quantities, int n, int k) {
  if (betas.empty()) throw std::invalid_argument("sweep: empty beta grid");
  const auto available = sweep_quantities(scenario);
  const std::vector<std::string> wanted = quantities.empty() ? available : quantities;
  for (const auto& q : wanted) {
    if (std::find(available.begin(), available.end(), q) == available.end()) {
      throw std::invalid_argument("quantity '" + q + "' is not available for scenario '" + scenario + "'");
    }
  }

  std::vector<SweepRow> rows;
  for (double beta : betas) {
    check_beta(beta);
    std::vector<std::pair<std::string, double>> values;
    if (scenario == "copy") {
      const Model model = build_copy(beta);
      const Subset all = model.space().all(), x = Subset::of({0});
      const PartitionFamily ext = projective_extension(model);
      FlowEvaluator flows(model, ext);
      const auto closed = analytic_copy(beta);
      values = {{"I_XZ", mutual_information(model, x)},
                {"I_YZ_given_X", classical_cmi(model, all, x)},
                {"I_X_to_Z", flows.flow(x, Subset())},
                {"I_Y_to_Z_given_X", flows.flow(all, x)},
                {"I_XY_Z", mutual_information(model, all)},
                {"I_XZ_closed_form", closed.i_xz},
                {"I_YZ_given_X_closed_form", closed.i_yz_given_x}};
    } else if (scenario == "transfer") {
      const auto r = transfer_report(beta);
      values = {{"I_YXp_given_X", r.classical_cmi}, {"I_Y_to_Xp_given_X", r.causal_flow}, {"I_YXp", r.mutual_info}};
    } else {
      const Model model = build_sum_coupled(n, k, beta);
      const Subset all = model.space().all(), first = Subset::of({0}), last = Subset::of({n - 1});
      const PartitionFamily ext = projective_extension(model);
      const PartitionFamily red = projective_reduction(model);
      FlowEvaluator e(model, ext), r(model, red);
      values = {{"I_XN_Z", mutual_information(model, all)},
                {"I_X1_Z", mutual_information(model, first)},
                {"extension_X1_to_Z", e.flow(first, Subset())},
                {"reduction_X1_to_Z", r.flow(first, Subset())},
                {"extension_Xn_to_Z_given_rest", e.flow(all, all - last)},
                {"reduction_Xn_to_Z_given_rest", r.flow(all, all - last)}};
    }
    for (const auto& q : wanted) {
      auto it = std::find_if(values.begin(), values.end(), [&](const auto& v) { return v.first == q; });
      rows.push_back({beta, q, it->second});
    }
  }
  return rows;
}

}  // namespace cflow
