#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbn/core.hpp"
#include "cbn/partition.hpp"

namespace cbn {

// ---------------------------------------------------------------- k-means

struct KMeansResult {
  Partition partition;
  std::vector<double> centroids;  // row-major K x m
  /// Sum of squared distances to the assigned centroid after each assignment step.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
};

/// Lloyd iterations from k-means++ seeding. Empty clusters are re-seeded
/// with the point farthest from its centroid.
KMeansResult kmeans(const PointCloud& cloud, std::size_t clusters, std::uint64_t seed,
                    std::size_t max_iterations = 300);

// ----------------------------------------------------------- hierarchical

enum class Linkage { Single, Complete, Average };

Linkage parse_linkage(const std::string& name);
std::string to_string(Linkage linkage);

/// One agglomeration step. Leaves are 0..n-1; the cluster formed by merge i
/// has id n + i.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // nondecreasing height
};

Dendrogram agglomerate(const DistanceMatrix& matrix, Linkage linkage);

struct DendrogramCut {
  enum class Kind { Height, Count, LargestGap };
  Kind kind = Kind::LargestGap;
  double height = 0.0;
  std::size_t count = 0;

  /// Keep merges strictly below `h`.
  static DendrogramCut at_height(double h) { return {Kind::Height, h, 0}; }
  static DendrogramCut into(std::size_t clusters) { return {Kind::Count, 0.0, clusters}; }
  /// Stop before the largest jump between consecutive merge heights.
  static DendrogramCut largest_gap() { return {Kind::LargestGap, 0.0, 0}; }
};

Partition cut_dendrogram(const Dendrogram& dendrogram, const DendrogramCut& cut);

struct HierarchicalResult {
  Partition partition;
  Dendrogram dendrogram;
};

HierarchicalResult hierarchical(const DistanceMatrix& matrix, Linkage linkage,
                                const DendrogramCut& cut);

// ----------------------------------------------------------------- DBSCAN

/// Classic DBSCAN over a distance matrix. A point is core when at least
/// `min_points` points (itself included) lie within `eps`. Border points join
/// the lowest-labelled cluster among their core neighbors; the rest are noise.
Partition dbscan(const DistanceMatrix& matrix, double eps, std::size_t min_points);

// ------------------------------------------------------------------ config

struct KMeansParams {
  std::size_t clusters = 1;
  std::size_t max_iterations = 300;
  std::uint64_t seed = 1;
};

struct HierarchicalParams {
  Linkage linkage = Linkage::Single;
  DendrogramCut cut = DendrogramCut::largest_gap();
};

struct DbscanParams {
  double eps = 1.0;
  std::size_t min_points = 1;
};

/// Exactly one algorithm's parameter block.
using BaselineConfig = std::variant<KMeansParams, HierarchicalParams, DbscanParams>;

Partition run_baseline(const BaselineConfig& config, const PointCloud& cloud,
                       const DistanceSpec& distance = {});

}  // namespace cbn
