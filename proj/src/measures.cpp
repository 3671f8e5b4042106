#include "cflow/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cflow {

double entropy(std::span<const double> p, double normalization_tol) {
  double total = 0.0;
  double h = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("entropy: negative or non-finite probability");
    total += v;
    if (v > 0.0) h -= v * std::log(v);
  }
  if (std::abs(total - 1.0) > normalization_tol) throw std::invalid_argument("entropy: distribution is not normalized");
  return h;
}

double conditional_entropy(const Model& model, Subset m, const Partition& conditioning) {
  const HatKernel kernel = hat_marginal(model, m, conditioning);
  double h = 0.0;
  for (int a = 0; a < conditioning.num_blocks(); ++a) {
    if (!kernel.defined(a)) continue;
    h += kernel.atom_mass[static_cast<std::size_t>(a)] * entropy(kernel.row(a), 1e-9);
  }
  return h;
}

double mutual_information(const Model& model, Subset m, const Partition& conditioning) {
  const HatKernel kernel = hat_marginal(model, m, conditioning);
  const auto marginal = pushforward_blocks(model);
  double info = 0.0;
  for (int a = 0; a < conditioning.num_blocks(); ++a) {
    if (!kernel.defined(a)) continue;
    const auto row = kernel.row(a);
    double local = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] > 0.0) local += row[c] * std::log(row[c] / marginal[c]);
    }
    info += kernel.atom_mass[static_cast<std::size_t>(a)] * local;
  }
  return info;
}

double mutual_information(const Model& model, Subset m) {
  return mutual_information(model, m, Partition::singletons(model.space().size(m)));
}

// ---------------------------------------------------------------------------
// Flows

FlowEvaluator::FlowEvaluator(const Model& model, const PartitionFamily& family)
    : model_(model), family_(family) {
  if (!(family.space() == model.space())) throw std::invalid_argument("family and model use different input spaces");
}

const HatKernel& FlowEvaluator::kernel(Subset m) {
  auto it = kernels_.find(m.bits());
  if (it == kernels_.end()) {
    it = kernels_.emplace(m.bits(), hat_marginal(model_, m, family_[m])).first;
  }
  return it->second;
}

double FlowEvaluator::flow(Subset m, Subset l) {
  if (!m.includes(l)) throw std::invalid_argument("information_flow: L is not a subset of M");
  const auto& space = model_.space();
  const HatKernel& upper = kernel(m);
  const HatKernel& lower = kernel(l);
  const auto weights = input_marginal(model_, m);
  const auto proj = space.projection_map(m, l);
  const std::size_t k = model_.num_outcomes();

  double info = 0.0;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    if (weights[x] == 0.0) continue;
    const auto num = upper.at(x);
    const auto den = lower.at(proj[x]);
    double local = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (num[c] == 0.0) continue;
      if (den[c] == 0.0) {
        // Under a projective family nu-hat_L is an average of nu-hat_M over a
        // coarser atom, so this cell cannot occur.
        if (family_.projective()) throw std::logic_error("information_flow: absolute continuity violated");
        return std::numeric_limits<double>::infinity();
      }
      local += num[c] * std::log(num[c] / den[c]);
    }
    info += weights[x] * local;
  }
  return info;
}

double information_flow(const Model& model, const PartitionFamily& family, Subset m, Subset l) {
  FlowEvaluator evaluator(model, family);
  return evaluator.flow(m, l);
}

double classical_cmi(const Model& model, Subset m, Subset l) {
  if (!m.includes(l)) throw std::invalid_argument("classical_cmi: L is not a subset of M");
  const PartitionFamily family = classical_family(model);
  return information_flow(model, family, m, l);
}

// ---------------------------------------------------------------------------
// Chain rule

namespace {

std::string term_label(const ProductSpace& space, Subset block, Subset given) {
  auto names = [&](Subset s) {
    std::string out;
    for (int i : s.members()) {
      if (!out.empty()) out += ",";
      out += space.name(i);
    }
    return out.empty() ? std::string("{}") : out;
  };
  std::string label = "I(" + names(block) + " -> Z";
  if (!given.is_empty()) label += " | " + names(given);
  return label + ")";
}

}  // namespace

FlowReport chain_decomposition(FlowEvaluator& evaluator, const std::vector<Subset>& ordering) {
  const auto& family = evaluator.family();
  const auto& space = evaluator.model().space();
  FlowReport report;
  report.ordering = ordering;
  report.family_kind = family.kind();
  report.projective = family.projective();
  report.gamma_resolved = evaluator.model().gamma_resolved();

  Subset prefix;
  double sum = 0.0;
  for (Subset block : ordering) {
    if (!space.all().includes(block)) throw std::invalid_argument("ordering refers to a nonexistent factor");
    if (!(block & prefix).is_empty()) throw std::invalid_argument("ordering blocks overlap");
    const Subset next = prefix | block;
    const double term = evaluator.flow(next, prefix);
    report.labels.push_back(term_label(space, block, prefix));
    report.terms.push_back(term);
    sum += term;
    prefix = next;
  }
  report.total = evaluator.flow(prefix, Subset());
  report.residual = std::abs(report.total - sum);
  if (std::isnan(report.residual)) report.residual = std::numeric_limits<double>::infinity();
  return report;
}

FlowReport chain_decomposition(const Model& model, const PartitionFamily& family,
                               const std::vector<Subset>& ordering) {
  FlowEvaluator evaluator(model, family);
  return chain_decomposition(evaluator, ordering);
}

}  // namespace cflow
