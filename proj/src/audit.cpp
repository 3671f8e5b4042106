#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cflow/measures.hpp"

namespace cflow {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

std::vector<AuditCheck> AuditReport::failures() const {
  std::vector<AuditCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const AuditCheck& c) { return !c.pass; });
  return out;
}

AuditReport natural_properties_audit(const Model& model, const PartitionFamily& family, Tolerances tol) {
  const auto& space = model.space();
  const Subset all = space.all();
  FlowEvaluator flows(model, family);
  const PartitionFamily classical = classical_family(model);
  FlowEvaluator classic(model, classical);

  AuditReport report;
  auto add = [&](std::string property, Subset m, Subset l, double lhs, double rhs, bool pass, std::string detail) {
    report.checks.push_back({std::move(property), m, l, lhs, rhs, pass, std::move(detail)});
  };

  {
    const double flow = flows.flow(all, Subset());
    const double mi = classic.flow(all, Subset());
    add("a", all, Subset(), flow, mi, std::abs(flow - mi) <= tol.equality,
        "flow(N -> Z) must equal I(X_N;Z)");
  }

  const auto subsets = subsets_of(all);
  for (Subset m : subsets) {
    const double flow = flows.flow(m, Subset());
    const double mi = classic.flow(m, Subset());
    add("b", m, Subset(), flow, mi, flow <= mi + tol.inequality, "flow(M -> Z) must not exceed I(X_M;Z)");
  }

  for (Subset m : subsets) {
    const Subset rest = all - m;
    const double flow = flows.flow(all, rest);
    const double cmi = classic.flow(all, rest);
    add("c", m, rest, flow, cmi, flow >= cmi - tol.inequality,
        "flow(M -> Z | N\\M) must be at least I(X_M;Z|X_{N\\M})");
    const bool vanishes = std::abs(flow) <= tol.equality;
    add("d", m, rest, flow, cmi, !vanishes || std::abs(cmi) <= tol.equality,
        "a vanishing flow(M -> Z | N\\M) must imply I(X_M;Z|X_{N\\M}) = 0");
  }

  for (Subset m : subsets) {
    const double outer = flows.flow(m, Subset());
    const bool vanishes = std::abs(outer) <= tol.equality;
    for (Subset l : subsets_of(m)) {
      const double inner = flows.flow(l, Subset());
      add("e", m, l, outer, inner, !vanishes || std::abs(inner) <= tol.equality,
          "flow(M -> Z) = 0 must imply flow(L -> Z) = 0 for L in M");
    }
  }
  return report;
}

namespace {

std::vector<std::vector<Subset>> singleton_orderings(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<Subset>> out;
  auto to_ordering = [](const std::vector<int>& p) {
    std::vector<Subset> o;
    for (int i : p) o.push_back(Subset::of({i}));
    return o;
  };
  if (n <= 6) {
    do {
      out.push_back(to_ordering(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    out.push_back(to_ordering(perm));
    std::reverse(perm.begin(), perm.end());
    out.push_back(to_ordering(perm));
  }
  return out;
}

}  // namespace

AuditReport verify_family(const Model& model, const PartitionFamily& family, Tolerances tol) {
  AuditReport report;
  const auto& cert = family.certificate();
  if (cert.projective) {
    report.checks.push_back({"projectivity", Subset(), Subset(), 0.0, 0.0, true, "family is projective"});
  } else {
    report.checks.push_back({"projectivity", cert.witness->second, cert.witness->first, 0.0, 0.0, false,
                             "family[M] does not refine the lift of family[L]"});
  }

  FlowEvaluator evaluator(model, family);
  for (const auto& ordering : singleton_orderings(model.space().num_factors())) {
    const FlowReport r = chain_decomposition(evaluator, ordering);
    Subset prefix;
    for (std::size_t j = 0; j < r.terms.size(); ++j) {
      const Subset next = prefix | ordering[j];
      report.checks.push_back({"nonnegativity", next, prefix, r.terms[j], 0.0,
                               r.terms[j] >= -tol.inequality, "flow term must be non-negative"});
      prefix = next;
    }
    report.checks.push_back({"chain-rule", prefix, Subset(), r.total, r.total - r.residual,
                             r.residual <= tol.equality, "sum of flow terms must equal the total flow"});
  }

  auto natural = natural_properties_audit(model, family, tol);
  report.checks.insert(report.checks.end(), natural.checks.begin(), natural.checks.end());
  return report;
}

std::string describe(const AuditCheck& check, const ProductSpace& space) {
  std::ostringstream os;
  os.precision(12);
  os << (check.pass ? "ok" : "FAILED") << " [" << check.property << "] M=" << space.subset_label(check.m)
     << " L=" << space.subset_label(check.l) << ": " << check.detail << " (lhs=" << check.lhs
     << ", rhs=" << check.rhs << ")";
  return os.str();
}

}  // namespace cflow
