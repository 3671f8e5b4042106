#include "cflow/partition.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cflow {

namespace {

constexpr std::size_t kMaxSpaceSize = std::size_t{1} << 24;

}  // namespace

// ---------------------------------------------------------------------------
// Subset

Subset Subset::of(std::initializer_list<int> indices) {
  return of(std::span<const int>(indices.begin(), indices.size()));
}

Subset Subset::of(std::span<const int> indices) {
  std::uint32_t bits = 0;
  for (int i : indices) {
    if (i < 0 || i >= kMaxFactors) throw std::invalid_argument("subset index out of range");
    bits |= std::uint32_t{1} << i;
  }
  return Subset(bits);
}

int Subset::size() const { return std::popcount(bits_); }

std::vector<int> Subset::members() const {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::vector<Subset> subsets_of(Subset m) {
  // Submask enumeration in increasing order.
  std::vector<Subset> out;
  std::uint32_t sub = 0;
  while (true) {
    out.emplace_back(sub);
    if (sub == m.bits()) break;
    sub = (sub - m.bits()) & m.bits();
  }
  return out;
}

// ---------------------------------------------------------------------------
// FiniteSet

FiniteSet::FiniteSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("finite set must have at least one element");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate state label '" + l + "'");
  }
}

FiniteSet FiniteSet::indexed(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return FiniteSet(std::move(labels));
}

std::optional<std::size_t> FiniteSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::span<const int> block_of) : block_of_(block_of.begin(), block_of.end()) {
  if (block_of_.empty()) throw std::invalid_argument("partition of an empty set");
  std::unordered_map<int, int> renumber;
  for (int& b : block_of_) {
    if (b < 0) throw std::invalid_argument("negative block id");
    auto [it, inserted] = renumber.try_emplace(b, static_cast<int>(renumber.size()));
    b = it->second;
  }
  num_blocks_ = static_cast<int>(renumber.size());
}

Partition::Partition(std::vector<int> block_of) : Partition(std::span<const int>(block_of)) {}

Partition Partition::trivial(std::size_t size) { return Partition(std::vector<int>(size, 0)); }

Partition Partition::singletons(std::size_t size) {
  std::vector<int> ids(size);
  std::iota(ids.begin(), ids.end(), 0);
  return Partition(std::move(ids));
}

Partition Partition::from_blocks(std::size_t size,
                                 const std::vector<std::vector<std::size_t>>& blocks) {
  std::vector<int> ids(size, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw std::invalid_argument("empty block");
    for (std::size_t e : blocks[b]) {
      if (e >= size) throw std::invalid_argument("block element out of range");
      if (ids[e] != -1) throw std::invalid_argument("element listed in two blocks");
      ids[e] = static_cast<int>(b);
    }
  }
  if (std::find(ids.begin(), ids.end(), -1) != ids.end()) {
    throw std::invalid_argument("blocks do not cover the ground set");
  }
  return Partition(std::move(ids));
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(num_blocks_));
  for (std::size_t i = 0; i < block_of_.size(); ++i) {
    out[static_cast<std::size_t>(block_of_[i])].push_back(i);
  }
  return out;
}

Partition join(const Partition& p, const Partition& q) {
  if (p.size() != q.size()) throw std::invalid_argument("join: ground-set mismatch");
  const auto kp = static_cast<std::size_t>(p.num_blocks());
  const auto kq = static_cast<std::size_t>(q.num_blocks());
  std::vector<int> ids(p.size());
  if (kp * kq <= (std::size_t{1} << 22)) {
    std::vector<int> table(kp * kq, -1);
    int next = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      int& slot = table[static_cast<std::size_t>(p.block_of(i)) * kq +
                        static_cast<std::size_t>(q.block_of(i))];
      if (slot < 0) slot = next++;
      ids[i] = slot;
    }
  } else {
    std::unordered_map<std::size_t, int> table;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto key = static_cast<std::size_t>(p.block_of(i)) * kq + static_cast<std::size_t>(q.block_of(i));
      auto [it, inserted] = table.try_emplace(key, static_cast<int>(table.size()));
      ids[i] = it->second;
    }
  }
  return Partition(std::move(ids));
}

bool refines(const Partition& p, const Partition& q) {
  if (p.size() != q.size()) throw std::invalid_argument("refines: ground-set mismatch");
  std::vector<int> image(static_cast<std::size_t>(p.num_blocks()), -1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    int& target = image[static_cast<std::size_t>(p.block_of(i))];
    if (target < 0) {
      target = q.block_of(i);
    } else if (target != q.block_of(i)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ProductSpace

namespace {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
  return names;
}

}  // namespace

ProductSpace::ProductSpace(std::vector<std::string> names, std::vector<FiniteSet> factors)
    : names_(std::move(names)), factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("product space needs at least one factor");
  if (factors_.size() > static_cast<std::size_t>(kMaxFactors)) {
    throw std::invalid_argument("at most " + std::to_string(kMaxFactors) + " input factors are supported");
  }
  if (names_.size() != factors_.size()) throw std::invalid_argument("one name per factor required");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("empty factor name");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate factor name '" + n + "'");
  }
  std::size_t total = 1;
  for (const auto& f : factors_) {
    total *= f.size();
    if (total > kMaxSpaceSize) throw std::invalid_argument("input space too large");
  }
}

// Copies rather than moves: argument evaluation order is unspecified.
ProductSpace::ProductSpace(std::vector<FiniteSet> factors)
    : ProductSpace(default_names(factors.size()), std::vector<FiniteSet>(factors)) {}

std::optional<int> ProductSpace::factor_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

void ProductSpace::check_subset(Subset m) const {
  if (!all().includes(m)) throw std::invalid_argument("subset refers to a nonexistent factor");
}

std::size_t ProductSpace::size(Subset m) const {
  check_subset(m);
  std::size_t s = 1;
  for (int i : m.members()) s *= factor(i).size();
  return s;
}

std::vector<std::size_t> ProductSpace::digits(std::size_t index, Subset m) const {
  check_subset(m);
  std::vector<std::size_t> out;
  for (int i : m.members()) {
    const std::size_t r = factor(i).size();
    out.push_back(index % r);
    index /= r;
  }
  if (index != 0) throw std::out_of_range("element index out of range");
  return out;
}

std::size_t ProductSpace::encode(std::span<const std::size_t> digits, Subset m) const {
  check_subset(m);
  const auto members = m.members();
  if (digits.size() != members.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const std::size_t r = factor(members[j]).size();
    if (digits[j] >= r) throw std::out_of_range("digit out of range");
    index += digits[j] * stride;
    stride *= r;
  }
  return index;
}

std::size_t ProductSpace::project(std::size_t index, Subset from, Subset to) const {
  if (!from.includes(to)) throw std::invalid_argument("projection target is not a subset of the source");
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int i : from.members()) {
    const std::size_t r = factor(i).size();
    const std::size_t d = index % r;
    index /= r;
    if (to.contains(i)) {
      out += d * stride;
      stride *= r;
    }
  }
  return out;
}

std::vector<std::size_t> ProductSpace::projection_map(Subset from, Subset to) const {
  if (!from.includes(to)) throw std::invalid_argument("projection target is not a subset of the source");
  const std::size_t n = size(from);
  std::vector<std::size_t> out(n);
  // Odometer over the digits of `from`, maintaining the projected index incrementally.
  const auto members = from.members();
  std::vector<std::size_t> radix, to_stride, digit(members.size(), 0);
  std::size_t stride = 1;
  for (int i : members) {
    radix.push_back(factor(i).size());
    to_stride.push_back(to.contains(i) ? stride : 0);
    if (to.contains(i)) stride *= factor(i).size();
  }
  std::size_t projected = 0;
  for (std::size_t x = 0; x < n; ++x) {
    out[x] = projected;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (++digit[j] < radix[j]) {
        projected += to_stride[j];
        break;
      }
      projected -= to_stride[j] * (radix[j] - 1);
      digit[j] = 0;
    }
  }
  return out;
}

std::size_t ProductSpace::combine(std::size_t x_m, Subset m, std::size_t x_c, Subset c) const {
  if (!(m & c).is_empty()) throw std::invalid_argument("combine: overlapping subsets");
  const Subset u = m | c;
  check_subset(u);
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int i : u.members()) {
    const std::size_t r = factor(i).size();
    std::size_t d;
    if (m.contains(i)) {
      d = x_m % r;
      x_m /= r;
    } else {
      d = x_c % r;
      x_c /= r;
    }
    out += d * stride;
    stride *= r;
  }
  if (x_m != 0 || x_c != 0) throw std::out_of_range("combine: element index out of range");
  return out;
}

std::string ProductSpace::label(std::size_t index, Subset m) const {
  const auto d = digits(index, m);
  const auto members = m.members();
  std::string out = "(";
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j) out += ",";
    out += factor(members[j]).label(d[j]);
  }
  return out + ")";
}

std::string ProductSpace::subset_label(Subset m) const {
  std::string out = "{";
  bool first = true;
  for (int i : m.members()) {
    if (!first) out += ",";
    out += name(i);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Lifts and hypergraph closures

Partition lift(const ProductSpace& space, const Partition& p, Subset l, Subset m) {
  if (!m.includes(l)) throw std::invalid_argument("lift: base subset is not contained in target");
  if (p.size() != space.size(l)) throw std::invalid_argument("lift: partition is not over X_L");
  if (l == m) return p;
  const auto proj = space.projection_map(m, l);
  std::vector<int> ids(proj.size());
  for (std::size_t x = 0; x < proj.size(); ++x) ids[x] = p.block_of(proj[x]);
  return Partition(std::move(ids));
}

Partition hyperedge_components(std::size_t ground_size,
                               const std::vector<std::vector<std::size_t>>& edges) {
  std::vector<std::size_t> parent(ground_size);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& edge : edges) {
    if (edge.empty()) throw std::invalid_argument("hyperedge_components: empty edge");
    for (std::size_t e : edge) {
      if (e >= ground_size) throw std::out_of_range("hyperedge_components: element out of range");
    }
    const std::size_t root = find(edge.front());
    for (std::size_t e : edge) {
      const std::size_t r = find(e);
      if (r != root) parent[r] = root;
    }
  }
  std::vector<int> ids(ground_size);
  for (std::size_t x = 0; x < ground_size; ++x) ids[x] = static_cast<int>(find(x));
  return Partition(std::move(ids));
}

}  // namespace cflow
