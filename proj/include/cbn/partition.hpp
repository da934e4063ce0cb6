#pragma once

#include <cstddef>
#include <vector>

namespace cbn {

/// Cluster label per point. Labels of clustered points are contiguous from 0;
/// `kNoise` marks points that belong to no cluster.
struct Partition {
  static constexpr int kNoise = -1;

  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  /// Number of distinct non-noise labels.
  std::size_t cluster_count() const;
  /// Member count per non-noise label.
  std::vector<std::size_t> cluster_sizes() const;

  /// Renumbers labels 0..c-1 by order of first appearance; noise is kept.
  static Partition canonical(const std::vector<int>& raw_labels);
};

/// True when every cluster of `fine` lies inside a single cluster of `coarse`.
bool is_refinement_of(const Partition& fine, const Partition& coarse);

}  // namespace cbn
