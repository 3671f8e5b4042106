#pragma once

// Channel-adapted partitions: distinguishability partitions under a fixed
// context, M-traces, and the two projective repairs of the trace family.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cflow/channel.hpp"
#include "cflow/partition.hpp"

namespace cflow {

enum class FamilyKind { raw_trace, extension, reduction, classical, custom };

std::string_view to_string(FamilyKind kind);
/// Accepts "raw-trace"/"raw_trace", "extension", "reduction", "classical", "custom".
std::optional<FamilyKind> parse_family_kind(std::string_view name);

struct ProjectivityCertificate {
  bool projective = true;
  /// A pair (L, M), L ⊆ M, for which family[M] does not refine lift(family[L], M).
  std::optional<std::pair<Subset, Subset>> witness;
};

/// One partition of X_M per subset M of the factors, indexed by bitmask.
class PartitionFamily {
 public:
  /// `members[M.bits()]` must partition X_M; members[{}] must be trivial.
  /// The projectivity certificate is computed here.
  PartitionFamily(ProductSpace space, std::vector<Partition> members, FamilyKind kind,
                  bool gamma_resolved = false);

  const Partition& operator[](Subset m) const { return members_.at(m.bits()); }
  const ProductSpace& space() const { return space_; }
  FamilyKind kind() const { return kind_; }
  const ProjectivityCertificate& certificate() const { return certificate_; }
  bool projective() const { return certificate_.projective; }
  bool gamma_resolved() const { return gamma_resolved_; }
  const std::vector<Partition>& members() const { return members_; }

 private:
  ProductSpace space_;
  std::vector<Partition> members_;
  FamilyKind kind_;
  bool gamma_resolved_;
  ProjectivityCertificate certificate_;
};

/// Checks refines(family[M], lift(family[L], M)) for all L ⊆ M. It suffices to
/// test L = M minus one factor, since lifts compose and refinement is transitive.
ProjectivityCertificate check_projectivity(const ProductSpace& space,
                                           const std::vector<Partition>& members);
ProjectivityCertificate check_projectivity(const PartitionFamily& family);

/// Partition of X_N generated by the channel: x ~ x' iff the rows agree within
/// tol on every gamma-block. Rows are clustered greedily in index order.
Partition channel_partition(const Model& model);

/// Distinguishability partition of X_M under the fixed context x̄ ∈ X_{N∖M}.
Partition context_trace(const Model& model, Subset m, std::size_t context);

/// Join of context_trace over all contexts.
Partition m_trace(const Model& model, Subset m);

/// Sections of the blocks of a partition of X_N at context x̄ ∈ X_{N∖M}.
Partition section_partition(const ProductSpace& space, const Partition& sigma, Subset m,
                            std::size_t context);
/// Join of section_partition over all contexts (trace of an arbitrary partition).
Partition trace(const ProductSpace& space, const Partition& sigma, Subset m);

PartitionFamily raw_trace_family(const Model& model);
/// Smallest projective family containing every trace.
PartitionFamily projective_extension(const Model& model);
/// Largest projective family contained in every trace.
PartitionFamily projective_reduction(const Model& model);
/// Singletons of X_M for every M (the unadapted, classical conditioning).
PartitionFamily classical_family(const Model& model);
PartitionFamily make_family(const Model& model, FamilyKind kind);

/// Generic constructions over an arbitrary partition `sigma` of X_N.
std::vector<Partition> extension_members(const ProductSpace& space, const std::vector<Partition>& traces);
std::vector<Partition> reduction_members(const ProductSpace& space, const Partition& sigma);

}  // namespace cflow
