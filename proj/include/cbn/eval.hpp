#pragma once

#include <cstdint>

#include "cbn/partition.hpp"

namespace cbn {

/// Pair-counting confusion over all unordered point pairs. Noise points are
/// treated as singleton clusters.
struct PairCounts {
  std::uint64_t tp = 0;  // together in both
  std::uint64_t tn = 0;  // apart in both
  std::uint64_t fp = 0;  // together in the candidate only
  std::uint64_t fn = 0;  // together in the reference only

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

PairCounts pair_counts(const Partition& reference, const Partition& candidate);

/// (TP + TN) / total. Throws for fewer than two points.
double rand_index(const PairCounts& counts);

/// TP / (TP + FP + FN), or 1 when no pair is co-clustered in either partition.
double jaccard_index(const PairCounts& counts);

}  // namespace cbn
