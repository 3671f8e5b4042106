#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "cflow/channel.hpp"
#include "cflow/partition.hpp"

namespace testing {

inline cflow::ProductSpace space_of(const std::vector<std::size_t>& sizes) {
  std::vector<cflow::FiniteSet> f;
  for (auto s : sizes) f.push_back(cflow::FiniteSet::indexed(s));
  return cflow::ProductSpace(std::move(f));
}

/// Model over indexed alphabets; `rows` is |X_N| x `outputs`, row-major.
inline cflow::Model make_model(const std::vector<std::size_t>& sizes, std::vector<double> mu,
                               std::vector<double> rows, std::size_t outputs,
                               std::optional<cflow::Partition> gamma = std::nullopt) {
  const auto space = space_of(sizes);
  return cflow::Model({space, std::move(mu)}, {space, cflow::FiniteSet::indexed(outputs), std::move(rows)},
                      std::move(gamma));
}

inline std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

inline cflow::Partition random_partition(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
  std::vector<int> ids(n);
  for (auto& id : ids) id = pick(rng);
  return cflow::Partition(ids);
}

/// A random partition that refines `coarse`: each block of `coarse` is split at random.
inline cflow::Partition random_refinement(std::mt19937_64& rng, const cflow::Partition& coarse) {
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<int> ids(coarse.size());
  for (std::size_t x = 0; x < ids.size(); ++x) ids[x] = coarse.block_of(x) * 3 + pick(rng);
  return cflow::Partition(ids);
}

}  // namespace testing
