#include "cflow/sigma.hpp"

#include <cmath>
#include <stdexcept>

namespace cflow {

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::raw_trace: return "raw-trace";
    case FamilyKind::extension: return "extension";
    case FamilyKind::reduction: return "reduction";
    case FamilyKind::classical: return "classical";
    case FamilyKind::custom: return "custom";
  }
  return "custom";
}

std::optional<FamilyKind> parse_family_kind(std::string_view name) {
  if (name == "raw-trace" || name == "raw_trace") return FamilyKind::raw_trace;
  if (name == "extension") return FamilyKind::extension;
  if (name == "reduction") return FamilyKind::reduction;
  if (name == "classical") return FamilyKind::classical;
  if (name == "custom") return FamilyKind::custom;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PartitionFamily

PartitionFamily::PartitionFamily(ProductSpace space, std::vector<Partition> members, FamilyKind kind,
                                 bool gamma_resolved)
    : space_(std::move(space)), members_(std::move(members)), kind_(kind), gamma_resolved_(gamma_resolved) {
  const std::size_t count = std::size_t{1} << space_.num_factors();
  if (members_.size() != count) throw std::invalid_argument("partition family must cover every subset");
  for (std::size_t bits = 0; bits < count; ++bits) {
    const Subset m(static_cast<std::uint32_t>(bits));
    if (members_[bits].size() != space_.size(m)) {
      throw std::invalid_argument("family member for " + space_.subset_label(m) + " is not a partition of X_M");
    }
  }
  certificate_ = check_projectivity(space_, members_);
}

ProjectivityCertificate check_projectivity(const ProductSpace& space, const std::vector<Partition>& members) {
  const std::size_t count = std::size_t{1} << space.num_factors();
  if (members.size() != count) throw std::invalid_argument("partition family must cover every subset");
  for (std::size_t bits = 1; bits < count; ++bits) {
    const Subset m(static_cast<std::uint32_t>(bits));
    for (int i : m.members()) {
      const Subset l = m - Subset::of({i});
      if (!refines(members[bits], lift(space, members[l.bits()], l, m))) {
        return {false, std::make_pair(l, m)};
      }
    }
  }
  return {true, std::nullopt};
}

ProjectivityCertificate check_projectivity(const PartitionFamily& family) {
  return check_projectivity(family.space(), family.members());
}

// ---------------------------------------------------------------------------
// Traces

namespace {

/// Offset of each x_M inside the full index; the full index of (x_M, x̄) is
/// offset_M[x_M] + offset_rest[x̄] because the mixed-radix digits are disjoint.
std::vector<std::size_t> embedding(const ProductSpace& space, Subset m) {
  const Subset rest = space.all() - m;
  std::vector<std::size_t> out(space.size(m));
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = space.combine(x, m, 0, rest);
  return out;
}

bool rows_agree(std::span<const double> a, std::span<const double> b, double tol) {
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (std::abs(a[c] - b[c]) > tol) return false;
  }
  return true;
}

/// Greedy clustering: each element joins the first earlier representative
/// whose row agrees within tol, else starts a new block.
Partition cluster_rows(const Model& model, std::span<const std::size_t> full_index) {
  std::vector<std::size_t> reps;
  std::vector<int> ids(full_index.size());
  for (std::size_t j = 0; j < full_index.size(); ++j) {
    const auto row = model.gamma_row(full_index[j]);
    int id = -1;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (rows_agree(row, model.gamma_row(full_index[reps[r]]), model.tol())) {
        id = static_cast<int>(r);
        break;
      }
    }
    if (id < 0) {
      id = static_cast<int>(reps.size());
      reps.push_back(j);
    }
    ids[j] = id;
  }
  return Partition(std::move(ids));
}

}  // namespace

Partition channel_partition(const Model& model) {
  std::vector<std::size_t> all(model.space().size());
  for (std::size_t x = 0; x < all.size(); ++x) all[x] = x;
  return cluster_rows(model, all);
}

Partition context_trace(const Model& model, Subset m, std::size_t context) {
  const auto& space = model.space();
  const Subset rest = space.all() - m;
  if (context >= space.size(rest)) throw std::out_of_range("context_trace: invalid context index");
  const std::size_t base = space.combine(0, m, context, rest);
  auto full = embedding(space, m);
  for (auto& f : full) f += base;
  return cluster_rows(model, full);
}

Partition m_trace(const Model& model, Subset m) {
  const auto& space = model.space();
  if (m.is_empty()) return Partition::trivial(1);
  const Subset rest = space.all() - m;
  const auto offsets = embedding(space, m);
  const std::size_t contexts = space.size(rest);
  std::optional<Partition> acc;
  std::vector<std::size_t> full(offsets.size());
  for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
    const std::size_t base = space.combine(0, m, ctx, rest);
    for (std::size_t x = 0; x < full.size(); ++x) full[x] = offsets[x] + base;
    Partition p = cluster_rows(model, full);
    acc = acc ? join(*acc, p) : std::move(p);
    if (acc->is_discrete()) break;
  }
  return *acc;
}

Partition section_partition(const ProductSpace& space, const Partition& sigma, Subset m, std::size_t context) {
  if (sigma.size() != space.size()) throw std::invalid_argument("section_partition: sigma is not over X_N");
  const Subset rest = space.all() - m;
  if (context >= space.size(rest)) throw std::out_of_range("section_partition: invalid context index");
  const std::size_t base = space.combine(0, m, context, rest);
  const auto offsets = embedding(space, m);
  std::vector<int> ids(offsets.size());
  for (std::size_t x = 0; x < ids.size(); ++x) ids[x] = sigma.block_of(offsets[x] + base);
  return Partition(std::move(ids));
}

Partition trace(const ProductSpace& space, const Partition& sigma, Subset m) {
  const std::size_t contexts = space.size(space.all() - m);
  Partition acc = section_partition(space, sigma, m, 0);
  for (std::size_t ctx = 1; ctx < contexts && !acc.is_discrete(); ++ctx) {
    acc = join(acc, section_partition(space, sigma, m, ctx));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Families

std::vector<Partition> extension_members(const ProductSpace& space, const std::vector<Partition>& traces) {
  // ext[M] = trace(M) ∨ ⋁_{i∈M} lift(ext[M∖{i}], M). Every proper L ⊂ M lies in
  // some M∖{i}, so this equals the join of lift(trace(L), M) over all L ⊆ M.
  const std::size_t count = std::size_t{1} << space.num_factors();
  if (traces.size() != count) throw std::invalid_argument("extension_members: need one trace per subset");
  std::vector<Partition> ext;
  ext.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    const Subset m(static_cast<std::uint32_t>(bits));
    Partition acc = traces[bits];
    for (int i : m.members()) {
      if (acc.is_discrete()) break;
      const Subset l = m - Subset::of({i});
      acc = join(acc, lift(space, ext[l.bits()], l, m));
    }
    ext.push_back(std::move(acc));
  }
  return ext;
}

std::vector<Partition> reduction_members(const ProductSpace& space, const Partition& sigma) {
  // Atoms of {A ⊆ X_M : A × X_{N∖M} is a union of sigma-blocks}: x_M and x'_M
  // are merged whenever one sigma-block projects onto both.
  const std::size_t count = std::size_t{1} << space.num_factors();
  const auto blocks = sigma.blocks();
  std::vector<Partition> out;
  out.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    const Subset m(static_cast<std::uint32_t>(bits));
    const auto proj = space.projection_map(space.all(), m);
    std::vector<std::vector<std::size_t>> edges;
    edges.reserve(blocks.size());
    for (const auto& block : blocks) {
      std::vector<std::size_t> edge;
      edge.reserve(block.size());
      for (std::size_t x : block) edge.push_back(proj[x]);
      edges.push_back(std::move(edge));
    }
    out.push_back(hyperedge_components(space.size(m), edges));
  }
  return out;
}

namespace {

std::vector<Partition> all_traces(const Model& model) {
  const auto& space = model.space();
  const std::size_t count = std::size_t{1} << space.num_factors();
  std::vector<Partition> traces;
  traces.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    traces.push_back(m_trace(model, Subset(static_cast<std::uint32_t>(bits))));
  }
  return traces;
}

}  // namespace

PartitionFamily raw_trace_family(const Model& model) {
  return PartitionFamily(model.space(), all_traces(model), FamilyKind::raw_trace, model.gamma_resolved());
}

PartitionFamily projective_extension(const Model& model) {
  return PartitionFamily(model.space(), extension_members(model.space(), all_traces(model)),
                         FamilyKind::extension, model.gamma_resolved());
}

PartitionFamily projective_reduction(const Model& model) {
  return PartitionFamily(model.space(), reduction_members(model.space(), channel_partition(model)),
                         FamilyKind::reduction, model.gamma_resolved());
}

PartitionFamily classical_family(const Model& model) {
  const auto& space = model.space();
  const std::size_t count = std::size_t{1} << space.num_factors();
  std::vector<Partition> members;
  members.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    members.push_back(Partition::singletons(space.size(Subset(static_cast<std::uint32_t>(bits)))));
  }
  return PartitionFamily(space, std::move(members), FamilyKind::classical, model.gamma_resolved());
}

PartitionFamily make_family(const Model& model, FamilyKind kind) {
  switch (kind) {
    case FamilyKind::raw_trace: return raw_trace_family(model);
    case FamilyKind::extension: return projective_extension(model);
    case FamilyKind::reduction: return projective_reduction(model);
    case FamilyKind::classical: return classical_family(model);
    case FamilyKind::custom: break;
  }
  throw std::invalid_argument("make_family: a custom family has to be supplied explicitly");
}

}  // namespace cflow
