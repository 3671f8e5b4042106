#pragma once

// Entropies, (conditional) mutual information, causal information flows over
// a partition family, chain-rule decompositions, and audits of the flow
// properties. All values are in nats.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cflow/channel.hpp"
#include "cflow/sigma.hpp"

namespace cflow {

struct Tolerances {
  double equality = 1e-9;     // equality assertions
  double inequality = 1e-12;  // slack on inequalities and sign checks
};

/// Shannon entropy of a probability vector, with 0 log 0 = 0.
/// Throws if the vector is not normalized within `normalization_tol`.
double entropy(std::span<const double> p, double normalization_tol = 1e-9);

/// H(gamma | conditioning) for a partition of X_M.
double conditional_entropy(const Model& model, Subset m, const Partition& conditioning);

/// sum_C ∫ nu-hat log(nu-hat / mu*) dmu_M for the given conditioning of X_M.
double mutual_information(const Model& model, Subset m, const Partition& conditioning);
/// I_gamma(X_M ; Z) with singleton conditioning.
double mutual_information(const Model& model, Subset m);

/// Caches the hat-marginal kernel of every subset under one family.
class FlowEvaluator {
 public:
  FlowEvaluator(const Model& model, const PartitionFamily& family);

  /// I_gamma(X_{M∖L} -> Z | X_L). Returns +inf if nu-hat_L vanishes on a cell
  /// where nu-hat_M does not, which can only happen for non-projective families.
  double flow(Subset m, Subset l);
  const HatKernel& kernel(Subset m);
  const Model& model() const { return model_; }
  const PartitionFamily& family() const { return family_; }

 private:
  const Model& model_;
  const PartitionFamily& family_;
  std::map<std::uint32_t, HatKernel> kernels_;
};

double information_flow(const Model& model, const PartitionFamily& family, Subset m, Subset l);

/// Classical I_gamma(X_{M∖L} ; Z | X_L): the flow under singleton conditioning.
double classical_cmi(const Model& model, Subset m, Subset l);

struct FlowReport {
  std::vector<Subset> ordering;
  std::vector<std::string> labels;  // one per term, e.g. "I(X2 -> Z | X1)"
  std::vector<double> terms;
  double total = 0.0;     // I_gamma(X_{M^k} -> Z)
  double residual = 0.0;  // |total - sum(terms)|
  FamilyKind family_kind = FamilyKind::custom;
  bool projective = true;
  bool gamma_resolved = false;
};

/// Chain-rule decomposition along disjoint blocks M_1, ..., M_k.
/// Throws std::invalid_argument if the blocks overlap.
FlowReport chain_decomposition(const Model& model, const PartitionFamily& family,
                               const std::vector<Subset>& ordering);
FlowReport chain_decomposition(FlowEvaluator& evaluator, const std::vector<Subset>& ordering);

/// One evaluated property check.
struct AuditCheck {
  std::string property;  // "a".."e", "chain-rule", "nonnegativity", "projectivity"
  Subset m;
  Subset l;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  bool passed() const;
  std::vector<AuditCheck> failures() const;
};

/// Checks properties (a)-(e) of the flows for every subset (and, for (e),
/// every pair L ⊆ M).
AuditReport natural_properties_audit(const Model& model, const PartitionFamily& family,
                                     Tolerances tol = {});

/// Full verification: projectivity, chain rule and term nonnegativity over
/// every ordering of singleton groups (all n! orderings up to n = 6, otherwise
/// the identity and reversed orderings), then natural_properties_audit.
AuditReport verify_family(const Model& model, const PartitionFamily& family, Tolerances tol = {});

/// Human-readable description of a failing check.
std::string describe(const AuditCheck& check, const ProductSpace& space);

}  // namespace cflow
