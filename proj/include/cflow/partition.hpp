#pragma once

// Finite-set partitions, product spaces over finite alphabets, and the
// lattice operations (join, refinement, lifts) that stand in for
// sigma-algebra manipulation on finite ground sets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cflow {

/// Maximum number of input factors; subsets are stored as bitmasks.
inline constexpr int kMaxFactors = 12;

/// A subset of the factor index set {0..n-1}, stored as a bitmask.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t bits) : bits_(bits) {}

  static Subset of(std::initializer_list<int> indices);
  static Subset of(std::span<const int> indices);
  static constexpr Subset full(int n) { return Subset((std::uint32_t{1} << n) - 1); }
  static constexpr Subset empty() { return Subset(); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  /// True iff `other` is a subset of *this.
  constexpr bool includes(Subset other) const { return (other.bits_ & ~bits_) == 0; }
  constexpr bool is_empty() const { return bits_ == 0; }
  int size() const;
  std::vector<int> members() const;

  friend constexpr Subset operator|(Subset a, Subset b) { return Subset(a.bits_ | b.bits_); }
  friend constexpr Subset operator&(Subset a, Subset b) { return Subset(a.bits_ & b.bits_); }
  friend constexpr Subset operator-(Subset a, Subset b) { return Subset(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(Subset, Subset) = default;
  friend constexpr auto operator<=>(Subset, Subset) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// All subsets of `m`, in increasing bitmask order (including the empty set and m itself).
std::vector<Subset> subsets_of(Subset m);

/// A finite state set with distinct display labels.
class FiniteSet {
 public:
  explicit FiniteSet(std::vector<std::string> labels);
  /// Elements labelled "0", "1", ..., "n-1".
  static FiniteSet indexed(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  friend bool operator==(const FiniteSet&, const FiniteSet&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Partition of {0..size-1}. Block ids are canonical: assigned in order of
/// first occurrence, so two partitions with the same blocks compare equal.
class Partition {
 public:
  /// Any non-negative ids are accepted and renumbered canonically.
  explicit Partition(std::span<const int> block_of);
  explicit Partition(std::vector<int> block_of);

  /// One block containing everything.
  static Partition trivial(std::size_t size);
  /// Every element in its own block.
  static Partition singletons(std::size_t size);
  /// Explicit block lists; the blocks must cover {0..size-1} exactly once.
  static Partition from_blocks(std::size_t size, const std::vector<std::vector<std::size_t>>& blocks);

  std::size_t size() const { return block_of_.size(); }
  int num_blocks() const { return num_blocks_; }
  int block_of(std::size_t element) const { return block_of_[element]; }
  std::span<const int> block_ids() const { return block_of_; }
  /// Members of each block, in increasing element order.
  std::vector<std::vector<std::size_t>> blocks() const;

  bool is_trivial() const { return num_blocks_ == 1; }
  bool is_discrete() const { return static_cast<std::size_t>(num_blocks_) == block_of_.size(); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> block_of_;
  int num_blocks_ = 0;
};

/// Coarsest common refinement: blocks are the nonempty pairwise intersections.
Partition join(const Partition& p, const Partition& q);

/// True iff every block of `p` lies inside a single block of `q`.
bool refines(const Partition& p, const Partition& q);

/// Cartesian product of finite alphabets X_1 x ... x X_n.
///
/// An element of X_M is indexed mixed-radix over the factors of M taken in
/// increasing order, with the lowest-numbered factor varying fastest. X_{} is a
/// one-element space (the empty sequence).
class ProductSpace {
 public:
  ProductSpace(std::vector<std::string> names, std::vector<FiniteSet> factors);
  /// Factors named X1..Xn.
  explicit ProductSpace(std::vector<FiniteSet> factors);

  int num_factors() const { return static_cast<int>(factors_.size()); }
  Subset all() const { return Subset::full(num_factors()); }
  const FiniteSet& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> factor_index(const std::string& name) const;

  /// |X_M|.
  std::size_t size(Subset m) const;
  std::size_t size() const { return size(all()); }

  /// Coordinates of `index` in X_M, one per member of M in increasing factor order.
  std::vector<std::size_t> digits(std::size_t index, Subset m) const;
  std::size_t encode(std::span<const std::size_t> digits, Subset m) const;

  /// Restriction x_from -> x_to; requires to ⊆ from.
  std::size_t project(std::size_t index, Subset from, Subset to) const;
  /// Table of project() over every element of X_from.
  std::vector<std::size_t> projection_map(Subset from, Subset to) const;
  /// The element of X_{m ∪ c} whose m-part is x_m and whose c-part is x_c (m, c disjoint).
  std::size_t combine(std::size_t x_m, Subset m, std::size_t x_c, Subset c) const;

  /// "(a,b)" style label of an element of X_M; "()" for the empty sequence.
  std::string label(std::size_t index, Subset m) const;
  /// "{X1,X3}" style label of a subset.
  std::string subset_label(Subset m) const;

  friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

 private:
  void check_subset(Subset m) const;

  std::vector<std::string> names_;
  std::vector<FiniteSet> factors_;
};

/// Pull back a partition of X_L along the projection X_M -> X_L (L ⊆ M).
Partition lift(const ProductSpace& space, const Partition& p, Subset l, Subset m);

/// Connected components of a hypergraph on {0..ground_size-1}: two elements
/// share a block iff a chain of overlapping edges links them.
Partition hyperedge_components(std::size_t ground_size,
                               const std::vector<std::vector<std::size_t>>& edges);

}  // namespace cflow
