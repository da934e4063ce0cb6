#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbn/core.hpp"
#include "cbn/homology.hpp"
#include "cbn/partition.hpp"

namespace cbn {

enum class ComponentMode { Strong, Weak };

ComponentMode parse_component_mode(const std::string& name);
std::string to_string(ComponentMode mode);

/// Thresholds on the relative Betti change. An empty tau means "auto":
/// resolve it from the upper boxplot whisker of the pooled changes.
struct TuningParams {
  std::optional<double> tau0;
  std::optional<double> tau1;
  ComponentMode mode = ComponentMode::Strong;
  std::optional<std::size_t> min_cluster_size;
  /// Skip the Betti refinement and cluster the raw kNN digraph.
  bool refine = true;
};

/// ||other - ref|| / ||ref||. Both-zero yields 0; a zero reference with a
/// nonzero other is undefined (nullopt) and fails every threshold.
std::optional<double> relative_change(std::span<const int> ref, std::span<const int> other);

/// Relative changes over all ordered pairs (i, j) with j in N(i), j != i.
/// Undefined changes are dropped.
struct PooledChanges {
  std::vector<double> beta0;
  std::vector<double> beta1;
  std::size_t undefined_beta0 = 0;
  std::size_t undefined_beta1 = 0;
};

PooledChanges pooled_relative_changes(const std::vector<Neighborhood>& neighborhoods,
                                      const std::vector<BettiProfile>& profiles);

struct Taus {
  double tau0 = 0.0;
  double tau1 = 0.0;
};

/// Upper whiskers (type-7 quartiles, fence Q3 + 1.5 IQR) of the two samples.
Taus default_taus(std::span<const double> beta0_changes, std::span<const double> beta1_changes);

/// Directed graph with edge i -> j iff j survives in the refined N(i).
/// Stored as sorted out-adjacency lists; every vertex has a self-loop.
class NeighborhoodGraph {
 public:
  explicit NeighborhoodGraph(std::vector<std::vector<std::size_t>> out);

  std::size_t size() const { return out_.size(); }
  const std::vector<std::size_t>& successors(std::size_t i) const { return out_[i]; }
  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const;

 private:
  std::vector<std::vector<std::size_t>> out_;
};

/// The unrefined kNN digraph.
NeighborhoodGraph knn_graph(const std::vector<Neighborhood>& neighborhoods);

NeighborhoodGraph refine_neighborhoods(const std::vector<Neighborhood>& neighborhoods,
                                       const std::vector<BettiProfile>& profiles, Taus taus,
                                       unsigned threads = 1);

/// Strongly (or weakly) connected components, labelled by first point appearance.
Partition extract_clusters(const NeighborhoodGraph& graph, ComponentMode mode);

/// Mahalanobis depth 1 / (1 + (x - mean)^T inv(cov) (x - mean)).
double mahalanobis_depth(std::span<const double> x, std::span<const double> mean,
                         const std::vector<double>& inverse_covariance);

/// Moves every point of a cluster smaller than `min_size` (and every noise
/// point) into the surviving cluster where its Mahalanobis depth is largest.
/// Survivor statistics are computed before any move; ties go to the lower label.
Partition reassign_small_clusters(const Partition& partition, const PointCloud& cloud,
                                  std::size_t min_size);

struct CbnResult {
  Partition partition;
  std::vector<Neighborhood> neighborhoods;
  std::vector<BettiProfile> profiles;
  NeighborhoodGraph graph{{}};
  Taus taus;
  bool tau0_auto = false;
  bool tau1_auto = false;
  PooledChanges changes;
};

CbnResult run_cbn(const PointCloud& cloud, const DistanceSpec& distance, std::size_t k,
                  const TuningParams& params, const ThresholdGrid& grid = ThresholdGrid::uniform(),
                  unsigned threads = 1);

}  // namespace cbn
