#include "cbn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "cbn/random.hpp"

namespace cbn {
namespace {

double squared_distance(std::span<const double> a, const double* b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) acc += (a[d] - b[d]) * (a[d] - b[d]);
  return acc;
}

}  // namespace

KMeansResult kmeans(const PointCloud& cloud, std::size_t clusters, std::uint64_t seed,
                    std::size_t max_iterations) {
  const std::size_t n = cloud.size();
  const std::size_t m = cloud.dimension();
  if (clusters < 1) throw std::invalid_argument("k-means needs at least one cluster");
  if (clusters > n) {
    throw std::invalid_argument(fmt::format("K = {} exceeds the number of points {}", clusters, n));
  }

  KMeansResult result;
  auto& centroids = result.centroids;
  centroids.assign(clusters * m, 0.0);
  auto centroid = [&](std::size_t c) { return centroids.data() + c * m; };
  auto set_centroid = [&](std::size_t c, std::size_t i) {
    std::copy_n(cloud.point(i).begin(), m, centroid(c));
  };

  // k-means++: first center uniform, the rest with probability ~ D^2.
  Rng rng(seed);
  set_centroid(0, rng.index(n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < clusters; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(cloud.point(i), centroid(c - 1)));
      total += nearest[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    set_centroid(c, pick);
  }

  std::vector<int> assignment(n, -1);
  std::vector<double> cost(n, 0.0);
  std::vector<std::size_t> counts(clusters);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(cloud.point(i), centroid(0));
      for (std::size_t c = 1; c < clusters; ++c) {
        const double d = squared_distance(cloud.point(i), centroid(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (assignment[i] != best) changed = true;
      assignment[i] = best;
      cost[i] = best_d;
      objective += best_d;
    }

    // Empty clusters take the point that is worst served by its centroid.
    std::fill(counts.begin(), counts.end(), 0);
    for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(assignment[i])] < 2) continue;
        if (far == n || cost[i] > cost[far]) far = i;
      }
      if (far == n) break;
      objective -= cost[far];
      --counts[static_cast<std::size_t>(assignment[far])];
      assignment[far] = static_cast<int>(c);
      cost[far] = 0.0;
      counts[c] = 1;
      changed = true;
    }
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::fill(centroids.begin(), centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = cloud.point(i);
      double* target = centroid(static_cast<std::size_t>(assignment[i]));
      for (std::size_t d = 0; d < m; ++d) target[d] += p[d];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      for (std::size_t d = 0; d < m; ++d) centroid(c)[d] /= static_cast<double>(counts[c]);
    }
  }
  result.partition = Partition::canonical(assignment);
  return result;
}

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  if (name == "average") return Linkage::Average;
  throw std::invalid_argument(fmt::format("unknown linkage '{}'", name));
}

std::string to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "unknown";
}

namespace {

struct LabelSets {
  std::vector<std::size_t> parent;
  explicit LabelSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

}  // namespace

// Nearest-neighbor chain with Lance-Williams updates. All three linkages are
// reducible, so the chain yields the same dendrogram as naive agglomeration
// once merges are sorted by height.
Dendrogram agglomerate(const DistanceMatrix& matrix, Linkage linkage) {
  const std::size_t n = matrix.size();
  Dendrogram dendrogram;
  dendrogram.leaves = n;
  if (n == 0) return dendrogram;

  DistanceMatrix d = matrix;
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  struct RawMerge {
    std::size_t a, b;
    double height;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);
  std::vector<std::size_t> chain;

  std::size_t remaining = n;
  while (remaining > 1) {
    if (chain.empty()) {
      chain.push_back(static_cast<std::size_t>(std::find(active.begin(), active.end(), 1) - active.begin()));
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
    std::size_t best = prev;
    double best_d = prev < n ? d(a, prev) : std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || j == a) continue;
      if (d(a, j) < best_d) {
        best_d = d(a, j);
        best = j;
      }
    }
    if (best != prev) {
      chain.push_back(best);
      continue;
    }

    chain.pop_back();
    chain.pop_back();
    const std::size_t keep = std::min(a, best);
    const std::size_t drop = std::max(a, best);
    raw.push_back({a, best, best_d});
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || j == keep || j == drop) continue;
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Single: merged = std::min(d(keep, j), d(drop, j)); break;
        case Linkage::Complete: merged = std::max(d(keep, j), d(drop, j)); break;
        case Linkage::Average:
          merged = (static_cast<double>(size[keep]) * d(keep, j) +
                    static_cast<double>(size[drop]) * d(drop, j)) /
                   static_cast<double>(size[keep] + size[drop]);
          break;
      }
      d(keep, j) = merged;
      d(j, keep) = merged;
    }
    size[keep] += size[drop];
    active[drop] = 0;
    --remaining;
  }

  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawMerge& x, const RawMerge& y) { return x.height < y.height; });

  // Translate slot indices to cluster ids in merge order.
  LabelSets sets(n);
  std::vector<std::size_t> cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), std::size_t{0});
  std::vector<std::size_t> cluster_size(n, 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t ra = sets.find(raw[i].a);
    const std::size_t rb = sets.find(raw[i].b);
    const std::size_t left = std::min(cluster_id[ra], cluster_id[rb]);
    const std::size_t right = std::max(cluster_id[ra], cluster_id[rb]);
    const std::size_t merged_size = cluster_size[ra] + cluster_size[rb];
    dendrogram.merges.push_back({left, right, raw[i].height, merged_size});
    sets.parent[rb] = ra;
    cluster_id[ra] = n + i;
    cluster_size[ra] = merged_size;
  }
  return dendrogram;
}

Partition cut_dendrogram(const Dendrogram& dendrogram, const DendrogramCut& cut) {
  const std::size_t n = dendrogram.leaves;
  const auto& merges = dendrogram.merges;
  std::size_t applied = 0;
  switch (cut.kind) {
    case DendrogramCut::Kind::Height:
      if (!(cut.height >= 0.0)) throw std::invalid_argument("cut height must be nonnegative");
      while (applied < merges.size() && merges[applied].height < cut.height) ++applied;
      break;
    case DendrogramCut::Kind::Count:
      if (cut.count < 1 || cut.count > n) {
        throw std::invalid_argument(
            fmt::format("target cluster count {} outside [1, {}]", cut.count, n));
      }
      applied = n - cut.count;
      break;
    case DendrogramCut::Kind::LargestGap: {
      applied = merges.size();
      double widest = -1.0;
      for (std::size_t i = 0; i + 1 < merges.size(); ++i) {
        const double gap = merges[i + 1].height - merges[i].height;
        if (gap > widest) {
          widest = gap;
          applied = i + 1;
        }
      }
      break;
    }
  }

  // Union the leaves under the first `applied` merges.
  std::vector<std::size_t> parent(n + applied);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < applied; ++i) {
    parent[find(merges[i].left)] = n + i;
    parent[find(merges[i].right)] = n + i;
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(find(i));
  return Partition::canonical(labels);
}

HierarchicalResult hierarchical(const DistanceMatrix& matrix, Linkage linkage,
                                const DendrogramCut& cut) {
  HierarchicalResult result;
  result.dendrogram = agglomerate(matrix, linkage);
  result.partition = cut_dendrogram(result.dendrogram, cut);
  return result;
}

Partition dbscan(const DistanceMatrix& matrix, double eps, std::size_t min_points) {
  if (!(eps > 0.0)) throw std::invalid_argument("DBSCAN eps must be positive");
  if (min_points < 1) throw std::invalid_argument("DBSCAN minPts must be at least 1");
  const std::size_t n = matrix.size();

  std::vector<std::vector<std::size_t>> neighbors(n);
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = matrix.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] <= eps) neighbors[i].push_back(j);
    }
    core[i] = neighbors[i].size() >= min_points ? 1 : 0;
  }

  // Core points reachable through core points share a cluster; clusters are
  // numbered by their lowest-index core point.
  std::vector<int> labels(n, Partition::kNoise);
  int next = 0;
  std::vector<std::size_t> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || labels[seed] != Partition::kNoise) continue;
    labels[seed] = next;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::size_t p = frontier.back();
      frontier.pop_back();
      for (std::size_t q : neighbors[p]) {
        if (core[q] && labels[q] == Partition::kNoise) {
          labels[q] = next;
          frontier.push_back(q);
        }
      }
    }
    ++next;
  }
  std::vector<int> result = labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t q : neighbors[i]) {
      if (!core[q]) continue;
      if (result[i] == Partition::kNoise || labels[q] < result[i]) result[i] = labels[q];
    }
  }
  return Partition::canonical(result);
}

Partition run_baseline(const BaselineConfig& config, const PointCloud& cloud,
                       const DistanceSpec& distance) {
  if (const auto* km = std::get_if<KMeansParams>(&config)) {
    return kmeans(cloud, km->clusters, km->seed, km->max_iterations).partition;
  }
  const auto matrix = build_distance_matrix(cloud, distance);
  if (const auto* hc = std::get_if<HierarchicalParams>(&config)) {
    return hierarchical(matrix, hc->linkage, hc->cut).partition;
  }
  const auto& db = std::get<DbscanParams>(config);
  return dbscan(matrix, db.eps, db.min_points);
}

}  // namespace cbn
