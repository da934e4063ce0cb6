#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbn/core.hpp"
#include "cbn/stats.hpp"

namespace cbn {

/// Strictly increasing filtration thresholds in [0, 1].
class ThresholdGrid {
 public:
  explicit ThresholdGrid(std::vector<double> thresholds);

  /// eps_j = step * (j - 1) for j = 1..count. The default is 0.00, 0.01, ..., 0.99.
  static ThresholdGrid uniform(std::size_t count = 100, double step = 0.01);

  std::size_t size() const { return thresholds_.size(); }
  double operator[](std::size_t j) const { return thresholds_[j]; }
  const std::vector<double>& values() const { return thresholds_; }

 private:
  std::vector<double> thresholds_;
};

/// Highest simplex dimension of the Vietoris-Rips complexes. Only graphs
/// (dimension 1) are supported; filled triangles would need boundary reduction.
enum class ComplexDimension { Graph = 1, Triangles = 2 };

struct FiltrationEdge {
  std::size_t a = 0;  // local vertex index
  std::size_t b = 0;
  double distance = 0.0;
};

/// All member pairs of a neighborhood with their transformed distance, sorted
/// by nondecreasing distance (ties by (a, b)).
std::vector<FiltrationEdge> edge_filtration(const Neighborhood& neighborhood,
                                            const DistanceMatrix& transformed);

struct BettiProfile {
  std::size_t owner = 0;
  std::vector<int> beta0;
  std::vector<int> beta1;
};

/// Betti-0 and Betti-1 of the graph filtration on `vertex_count` vertices,
/// sampled at each grid threshold. An edge is active at eps when its
/// distance is <= eps. `edges` must be sorted by distance.
BettiProfile betti_sequences(std::span<const FiltrationEdge> edges, std::size_t vertex_count,
                             const ThresholdGrid& grid);

BettiProfile betti_sequences(const Neighborhood& neighborhood, const DistanceMatrix& transformed,
                             const ThresholdGrid& grid,
                             ComplexDimension dimension = ComplexDimension::Graph);

std::vector<BettiProfile> betti_profiles(const std::vector<Neighborhood>& neighborhoods,
                                         const DistanceMatrix& transformed,
                                         const ThresholdGrid& grid, unsigned threads = 1);

/// Per-threshold distribution of beta0 and beta1 over all profiles.
struct BettiSummaryRow {
  FiveNumberSummary beta0;
  FiveNumberSummary beta1;
};

std::vector<BettiSummaryRow> betti_dynamics_summary(const std::vector<BettiProfile>& profiles);

}  // namespace cbn
