#include "cbn/homology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "cbn/parallel.hpp"

namespace cbn {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false when a and b were already connected.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace

ThresholdGrid::ThresholdGrid(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
  if (thresholds_.size() < 2) throw std::invalid_argument("threshold grid needs at least 2 values");
  for (std::size_t j = 0; j < thresholds_.size(); ++j) {
    const double t = thresholds_[j];
    if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
      throw std::invalid_argument(fmt::format("threshold {} = {} lies outside [0, 1]", j, t));
    }
    if (j > 0 && !(t > thresholds_[j - 1])) {
      throw std::invalid_argument("thresholds must be strictly increasing");
    }
  }
}

ThresholdGrid ThresholdGrid::uniform(std::size_t count, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("threshold step must be positive");
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) t[j] = step * static_cast<double>(j);
  return ThresholdGrid(std::move(t));
}

std::vector<FiltrationEdge> edge_filtration(const Neighborhood& neighborhood,
                                            const DistanceMatrix& transformed) {
  const auto& members = neighborhood.members;
  std::vector<FiltrationEdge> edges;
  edges.reserve(members.size() * (members.size() - 1) / 2);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      if (members[a] >= transformed.size() || members[b] >= transformed.size()) {
        throw std::invalid_argument("neighborhood member outside the distance matrix");
      }
      edges.push_back({a, b, transformed(members[a], members[b])});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const FiltrationEdge& x, const FiltrationEdge& y) {
    return std::tie(x.distance, x.a, x.b) < std::tie(y.distance, y.a, y.b);
  });
  return edges;
}

BettiProfile betti_sequences(std::span<const FiltrationEdge> edges, std::size_t vertex_count,
                             const ThresholdGrid& grid) {
  BettiProfile profile;
  profile.beta0.resize(grid.size());
  profile.beta1.resize(grid.size());

  DisjointSets sets(vertex_count);
  int components = static_cast<int>(vertex_count);
  int cycles = 0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    // Each inserted edge either merges two components or closes one cycle.
    while (next < edges.size() && edges[next].distance <= grid[j]) {
      if (sets.unite(edges[next].a, edges[next].b)) {
        --components;
      } else {
        ++cycles;
      }
      ++next;
    }
    profile.beta0[j] = components;
    profile.beta1[j] = cycles;
  }
  return profile;
}

BettiProfile betti_sequences(const Neighborhood& neighborhood, const DistanceMatrix& transformed,
                             const ThresholdGrid& grid, ComplexDimension dimension) {
  if (dimension != ComplexDimension::Graph) {
    throw std::invalid_argument("only dimension-1 Vietoris-Rips complexes are supported");
  }
  const auto edges = edge_filtration(neighborhood, transformed);
  BettiProfile profile = betti_sequences(edges, neighborhood.members.size(), grid);
  profile.owner = neighborhood.center;
  return profile;
}

std::vector<BettiProfile> betti_profiles(const std::vector<Neighborhood>& neighborhoods,
                                         const DistanceMatrix& transformed,
                                         const ThresholdGrid& grid, unsigned threads) {
  std::vector<BettiProfile> profiles(neighborhoods.size());
  parallel_for(neighborhoods.size(), threads, [&](std::size_t i) {
    profiles[i] = betti_sequences(neighborhoods[i], transformed, grid);
  });
  return profiles;
}

std::vector<BettiSummaryRow> betti_dynamics_summary(const std::vector<BettiProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no Betti profiles to summarize");
  const std::size_t length = profiles.front().beta0.size();
  for (const auto& p : profiles) {
    if (p.beta0.size() != length || p.beta1.size() != length) {
      throw std::invalid_argument("Betti profiles have mixed grid lengths");
    }
  }
  std::vector<BettiSummaryRow> rows(length);
  std::vector<double> b0(profiles.size());
  std::vector<double> b1(profiles.size());
  for (std::size_t j = 0; j < length; ++j) {
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      b0[i] = profiles[i].beta0[j];
      b1[i] = profiles[i].beta1[j];
    }
    rows[j] = {five_number_summary(b0), five_number_summary(b1)};
  }
  return rows;
}

}  // namespace cbn
