#include "cbn/cbn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "cbn/parallel.hpp"
#include "cbn/stats.hpp"

namespace cbn {

ComponentMode parse_component_mode(const std::string& name) {
  if (name == "strong") return ComponentMode::Strong;
  if (name == "weak") return ComponentMode::Weak;
  throw std::invalid_argument(fmt::format("unknown component mode '{}'", name));
}

std::string to_string(ComponentMode mode) {
  return mode == ComponentMode::Strong ? "strong" : "weak";
}

std::optional<double> relative_change(std::span<const int> ref, std::span<const int> other) {
  if (ref.size() != other.size()) {
    throw std::invalid_argument(
        fmt::format("Betti vectors differ in length ({} vs {})", ref.size(), other.size()));
  }
  double ref_sq = 0.0;
  double diff_sq = 0.0;
  for (std::size_t j = 0; j < ref.size(); ++j) {
    const double r = ref[j];
    const double d = static_cast<double>(other[j]) - r;
    ref_sq += r * r;
    diff_sq += d * d;
  }
  if (ref_sq == 0.0) {
    if (diff_sq == 0.0) return 0.0;
    return std::nullopt;
  }
  return std::sqrt(diff_sq) / std::sqrt(ref_sq);
}

PooledChanges pooled_relative_changes(const std::vector<Neighborhood>& neighborhoods,
                                      const std::vector<BettiProfile>& profiles) {
  PooledChanges pooled;
  for (const auto& nb : neighborhoods) {
    const auto& ref = profiles.at(nb.center);
    for (std::size_t j : nb.members) {
      if (j == nb.center) continue;
      const auto& other = profiles.at(j);
      if (auto c = relative_change(ref.beta0, other.beta0)) {
        pooled.beta0.push_back(*c);
      } else {
        ++pooled.undefined_beta0;
      }
      if (auto c = relative_change(ref.beta1, other.beta1)) {
        pooled.beta1.push_back(*c);
      } else {
        ++pooled.undefined_beta1;
      }
    }
  }
  return pooled;
}

Taus default_taus(std::span<const double> beta0_changes, std::span<const double> beta1_changes) {
  if (beta0_changes.empty() || beta1_changes.empty()) {
    throw std::invalid_argument("no defined relative Betti changes to derive default taus from");
  }
  return {upper_whisker({beta0_changes.begin(), beta0_changes.end()}),
          upper_whisker({beta1_changes.begin(), beta1_changes.end()})};
}

NeighborhoodGraph::NeighborhoodGraph(std::vector<std::vector<std::size_t>> out)
    : out_(std::move(out)) {
  for (std::size_t i = 0; i < out_.size(); ++i) {
    auto& succ = out_[i];
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    if (!succ.empty() && succ.back() >= out_.size()) {
      throw std::invalid_argument("neighborhood graph edge points outside the vertex set");
    }
    if (!std::binary_search(succ.begin(), succ.end(), i)) {
      succ.insert(std::lower_bound(succ.begin(), succ.end(), i), i);
    }
  }
}

bool NeighborhoodGraph::has_edge(std::size_t i, std::size_t j) const {
  return std::binary_search(out_[i].begin(), out_[i].end(), j);
}

std::size_t NeighborhoodGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& s : out_) total += s.size();
  return total;
}

NeighborhoodGraph knn_graph(const std::vector<Neighborhood>& neighborhoods) {
  std::vector<std::vector<std::size_t>> out(neighborhoods.size());
  for (const auto& nb : neighborhoods) out.at(nb.center) = nb.members;
  return NeighborhoodGraph(std::move(out));
}

NeighborhoodGraph refine_neighborhoods(const std::vector<Neighborhood>& neighborhoods,
                                       const std::vector<BettiProfile>& profiles, Taus taus,
                                       unsigned threads) {
  if (profiles.size() != neighborhoods.size()) {
    throw std::invalid_argument("Betti profiles do not cover every point");
  }
  if (taus.tau0 < 0.0 || taus.tau1 < 0.0 || std::isnan(taus.tau0) || std::isnan(taus.tau1)) {
    throw std::invalid_argument("tau values must be nonnegative");
  }
  std::vector<std::vector<std::size_t>> out(neighborhoods.size());
  parallel_for(neighborhoods.size(), threads, [&](std::size_t idx) {
    const auto& nb = neighborhoods[idx];
    const auto& ref = profiles.at(nb.center);
    auto& kept = out.at(nb.center);
    for (std::size_t j : nb.members) {
      if (j == nb.center) {
        kept.push_back(j);
        continue;
      }
      const auto& other = profiles.at(j);
      const auto c0 = relative_change(ref.beta0, other.beta0);
      const auto c1 = relative_change(ref.beta1, other.beta1);
      if (c0 && c1 && *c0 <= taus.tau0 && *c1 <= taus.tau1) kept.push_back(j);
    }
  });
  return NeighborhoodGraph(std::move(out));
}

namespace {

// Iterative Tarjan; returns a component id per vertex.
std::vector<int> strong_components(const NeighborhoodGraph& graph) {
  const std::size_t n = graph.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> lowlink(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<int> component(n, -1);
  int next_component = 0;
  std::size_t counter = 0;

  struct Frame {
    std::size_t vertex;
    std::size_t next_edge;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!call.empty()) {
      Frame& frame = call.back();
      const std::size_t v = frame.vertex;
      const auto& succ = graph.successors(v);
      if (frame.next_edge < succ.size()) {
        const std::size_t w = succ[frame.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component[w] = next_component;
        } while (w != v);
        ++next_component;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().vertex;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return component;
}

std::vector<int> weak_components(const NeighborhoodGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : graph.successors(i)) {
      const std::size_t a = find(i);
      const std::size_t b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> component(n);
  for (std::size_t i = 0; i < n; ++i) component[i] = static_cast<int>(find(i));
  return component;
}

}  // namespace

Partition extract_clusters(const NeighborhoodGraph& graph, ComponentMode mode) {
  return Partition::canonical(mode == ComponentMode::Strong ? strong_components(graph)
                                                            : weak_components(graph));
}

double mahalanobis_depth(std::span<const double> x, std::span<const double> mean,
                         const std::vector<double>& inverse_covariance) {
  const std::size_t m = x.size();
  if (mean.size() != m || inverse_covariance.size() != m * m) {
    throw std::invalid_argument("Mahalanobis depth: dimension mismatch");
  }
  double q = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < m; ++c) row += inverse_covariance[r * m + c] * (x[c] - mean[c]);
    q += (x[r] - mean[r]) * row;
  }
  return 1.0 / (1.0 + std::max(0.0, q));
}

Partition reassign_small_clusters(const Partition& partition, const PointCloud& cloud,
                                  std::size_t min_size) {
  if (partition.size() != cloud.size()) {
    throw std::invalid_argument("partition and point cloud differ in size");
  }
  if (min_size < 1) throw std::invalid_argument("minimum cluster size must be positive");
  const std::size_t m = cloud.dimension();
  const auto sizes = partition.cluster_sizes();

  struct Survivor {
    int label;
    std::vector<double> mean;
    std::vector<double> inverse_covariance;
  };
  std::vector<Survivor> survivors;
  bool has_estimable = false;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < min_size) continue;
    has_estimable = has_estimable || sizes[c] >= m + 1;

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (partition.labels[i] != static_cast<int>(c)) continue;
      mean += Eigen::Map<const Eigen::VectorXd>(cloud.point(i).data(), static_cast<Eigen::Index>(m));
    }
    mean /= static_cast<double>(sizes[c]);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (partition.labels[i] != static_cast<int>(c)) continue;
      const Eigen::VectorXd d =
          Eigen::Map<const Eigen::VectorXd>(cloud.point(i).data(), static_cast<Eigen::Index>(m)) - mean;
      cov += d * d.transpose();
    }
    if (sizes[c] > 1) cov /= static_cast<double>(sizes[c] - 1);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
    if (!lu.isInvertible()) {
      const double trace = cov.trace();
      const double ridge = trace > 0.0 ? 1e-9 * trace / static_cast<double>(m) : 1e-9;
      cov.diagonal().array() += ridge;
      lu.compute(cov);
    }
    const Eigen::MatrixXd inv = lu.inverse();

    Survivor s;
    s.label = static_cast<int>(c);
    s.mean.assign(mean.data(), mean.data() + m);
    s.inverse_covariance.resize(m * m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t col = 0; col < m; ++col) {
        s.inverse_covariance[r * m + col] =
            inv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
      }
    }
    survivors.push_back(std::move(s));
  }
  if (!has_estimable) {
    throw std::invalid_argument(fmt::format(
        "no cluster has at least {} points (minimum size {} and dimension {} + 1)",
        std::max(min_size, m + 1), min_size, m));
  }

  std::vector<int> labels = partition.labels;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int label = partition.labels[i];
    if (label != Partition::kNoise && sizes[static_cast<std::size_t>(label)] >= min_size) continue;
    double best_depth = -1.0;
    int best_label = survivors.front().label;
    for (const auto& s : survivors) {
      const double depth = mahalanobis_depth(cloud.point(i), s.mean, s.inverse_covariance);
      if (depth > best_depth) {
        best_depth = depth;
        best_label = s.label;
      }
    }
    labels[i] = best_label;
  }
  return Partition::canonical(labels);
}

CbnResult run_cbn(const PointCloud& cloud, const DistanceSpec& distance, std::size_t k,
                  const TuningParams& params, const ThresholdGrid& grid, unsigned threads) {
  if (k < 2) throw std::invalid_argument("CBN requires k >= 2");
  if (k > cloud.size()) {
    throw std::invalid_argument(
        fmt::format("k = {} exceeds the number of points {}", k, cloud.size()));
  }
  if ((params.tau0 && !(*params.tau0 >= 0.0)) || (params.tau1 && !(*params.tau1 >= 0.0))) {
    throw std::invalid_argument("explicit tau values must be nonnegative");
  }

  CbnResult result;
  auto matrix = build_distance_matrix(cloud, distance);
  result.neighborhoods = knn_neighborhoods(matrix, k, threads);
  const auto ecdf = fit_ecdf(result.neighborhoods);
  const auto transformed = transform_distances(std::move(matrix), ecdf, threads);
  result.profiles = betti_profiles(result.neighborhoods, transformed, grid, threads);
  result.changes = pooled_relative_changes(result.neighborhoods, result.profiles);

  if (params.refine) {
    result.tau0_auto = !params.tau0.has_value();
    result.tau1_auto = !params.tau1.has_value();
    auto resolve = [](const std::optional<double>& explicit_tau, const std::vector<double>& changes,
                      const char* name) {
      if (explicit_tau) return *explicit_tau;
      if (changes.empty()) {
        throw std::invalid_argument(
            fmt::format("cannot derive {} automatically: no defined relative changes", name));
      }
      return upper_whisker(changes);
    };
    result.taus.tau0 = resolve(params.tau0, result.changes.beta0, "tau0");
    result.taus.tau1 = resolve(params.tau1, result.changes.beta1, "tau1");
    result.graph = refine_neighborhoods(result.neighborhoods, result.profiles, result.taus, threads);
  } else {
    result.taus = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    result.graph = knn_graph(result.neighborhoods);
  }

  result.partition = extract_clusters(result.graph, params.mode);
  if (params.min_cluster_size && *params.min_cluster_size > 1) {
    result.partition = reassign_small_clusters(result.partition, cloud, *params.min_cluster_size);
  }
  return result;
}

}  // namespace cbn
