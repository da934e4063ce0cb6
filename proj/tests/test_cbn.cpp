#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

#include "cbn/cbn.hpp"
#include "cbn/eval.hpp"
#include "cbn/random.hpp"
#include "cbn/stats.hpp"
#include "oracles.hpp"

using namespace cbn;

namespace {

std::vector<int> vec(std::initializer_list<int> v) { return v; }

PointCloud blobs(std::uint64_t seed, std::size_t per_blob, double separation,
                 std::vector<int>* truth = nullptr) {
  Rng rng(seed);
  std::vector<std::vector<double>> pts;
  for (int blob = 0; blob < 2; ++blob) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      pts.push_back({rng.uniform(0.0, 1.0) + blob * separation, rng.uniform(0.0, 1.0)});
      if (truth) truth->push_back(blob);
    }
  }
  return PointCloud(std::move(pts));
}

PointCloud uniform_cloud(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(), rng.uniform()});
  return PointCloud(std::move(pts));
}

struct Pipeline {
  std::vector<Neighborhood> nbs;
  std::vector<BettiProfile> profiles;
};

Pipeline pipeline(const PointCloud& cloud, std::size_t k) {
  auto m = build_distance_matrix(cloud, {});
  Pipeline p;
  p.nbs = knn_neighborhoods(m, k);
  auto t = transform_distances(m, fit_ecdf(p.nbs));
  p.profiles = betti_profiles(p.nbs, t, ThresholdGrid::uniform());
  return p;
}

}  // namespace

TEST_CASE("relative change examples") {
  const auto a = vec({5, 3, 1});
  CHECK(*relative_change(a, a) == 0.0);
  const auto ref = vec({4, 2, 1});
  const auto other = vec({4, 2, 3});
  CHECK(*relative_change(ref, other) == doctest::Approx(2.0 / std::sqrt(21.0)));
  CHECK(*relative_change(ref, other) == doctest::Approx(0.4364).epsilon(1e-4));
  const auto zero = vec({0, 0, 0});
  CHECK(*relative_change(zero, zero) == 0.0);
  CHECK_FALSE(relative_change(zero, vec({0, 1, 0})).has_value());
  CHECK(relative_change(vec({0, 1, 0}), zero).has_value());
  CHECK_THROWS_AS(relative_change(vec({1, 2}), vec({1})), std::invalid_argument);
}

TEST_CASE("quantiles and the upper whisker") {
  std::vector<double> v{1, 2, 3, 4, 100};
  CHECK(quantile_type7(v, 0.25) == 2.0);
  CHECK(quantile_type7(v, 0.75) == 4.0);
  CHECK(quantile_type7(v, 0.5) == 3.0);
  CHECK(upper_whisker(v) == 4.0);
  CHECK(upper_whisker({0.3, 0.3, 0.3}) == 0.3);
  CHECK(quantile_type7(std::vector<double>{1, 2}, 0.25) == doctest::Approx(1.25));
  CHECK_THROWS_AS(upper_whisker({}), std::invalid_argument);

  auto s = five_number_summary({4, 1, 3, 2});
  CHECK(s.min == 1);
  CHECK(s.q1 == doctest::Approx(1.75));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.q3 == doctest::Approx(3.25));
  CHECK(s.max == 4);
}

TEST_CASE("default taus") {
  std::vector<double> b0{1, 2, 3, 4, 100};
  std::vector<double> b1{0.5, 0.5};
  auto t = default_taus(b0, b1);
  CHECK(t.tau0 == 4.0);
  CHECK(t.tau1 == 0.5);
  CHECK_THROWS_AS(default_taus(b0, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("refinement thresholds") {
  // points 0 and 1 are each other's neighbors
  std::vector<Neighborhood> nbs{{0, {0, 1}, {1.0}}, {1, {1, 0}, {1.0}}};
  std::vector<BettiProfile> profiles{{0, {4, 2, 1}, {0, 0, 0}}, {1, {4, 2, 3}, {0, 0, 0}}};

  auto pruned = refine_neighborhoods(nbs, profiles, {0.42, 1.0});
  CHECK_FALSE(pruned.has_edge(0, 1));
  CHECK(pruned.has_edge(0, 0));
  auto kept = refine_neighborhoods(nbs, profiles, {0.44, 1.0});
  CHECK(kept.has_edge(0, 1));

  auto exact = refine_neighborhoods(nbs, profiles, {0.0, 0.0});
  CHECK(exact.edge_count() == 2);

  // undefined beta1 change fails any finite tau
  profiles[1].beta1 = {0, 1, 1};
  auto undefined = refine_neighborhoods(nbs, profiles, {1e9, 1e9});
  CHECK_FALSE(undefined.has_edge(0, 1));
  CHECK(undefined.has_edge(1, 0));

  CHECK_THROWS_AS(refine_neighborhoods(nbs, profiles, {-0.1, 1.0}), std::invalid_argument);
}

TEST_CASE("infinite taus give the knn digraph") {
  auto cloud = uniform_cloud(1, 150);
  auto p = pipeline(cloud, 8);
  const double inf = std::numeric_limits<double>::infinity();
  auto refined = refine_neighborhoods(p.nbs, p.profiles, {inf, inf});
  auto raw = knn_graph(p.nbs);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(refined.successors(i) == raw.successors(i));
  }
}

TEST_CASE("refined graph properties") {
  auto cloud = uniform_cloud(4, 200);
  auto p = pipeline(cloud, 10);
  auto changes = pooled_relative_changes(p.nbs, p.profiles);
  CHECK(changes.beta0.size() + changes.undefined_beta0 == 200 * 9);
  auto taus = default_taus(changes.beta0, changes.beta1);
  auto g = refine_neighborhoods(p.nbs, p.profiles, taus);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.has_edge(i, i));
    for (std::size_t j : g.successors(i)) {
      CHECK(std::find(p.nbs[i].members.begin(), p.nbs[i].members.end(), j) != p.nbs[i].members.end());
    }
  }
}

TEST_CASE("raising a tau never removes an edge") {
  auto cloud = uniform_cloud(11, 180);
  auto p = pipeline(cloud, 9);
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    Taus low{rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8)};
    Taus high = low;
    if (trial % 2 == 0) high.tau0 += rng.uniform(0.0, 0.5);
    else high.tau1 += rng.uniform(0.0, 0.5);
    auto a = refine_neighborhoods(p.nbs, p.profiles, low);
    auto b = refine_neighborhoods(p.nbs, p.profiles, high);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j : a.successors(i)) CHECK(b.has_edge(i, j));
    }
    // fewer edges can only split strong components
    CHECK(oracle::refines(extract_clusters(a, ComponentMode::Strong),
                          extract_clusters(b, ComponentMode::Strong)));
  }
}

TEST_CASE("component extraction") {
  // 0-based version of 1->2, 2->1, 2->3
  NeighborhoodGraph g({{1}, {0, 2}, {}});
  CHECK(extract_clusters(g, ComponentMode::Strong).labels == vec({0, 0, 1}));
  CHECK(extract_clusters(g, ComponentMode::Weak).labels == vec({0, 0, 0}));

  NeighborhoodGraph isolated({{}, {}, {}, {}});
  CHECK(extract_clusters(isolated, ComponentMode::Strong).cluster_count() == 4);

  // labels follow first appearance
  NeighborhoodGraph later({{}, {3}, {}, {1}});
  CHECK(extract_clusters(later, ComponentMode::Strong).labels == vec({0, 1, 2, 1}));

  CHECK_THROWS_AS(NeighborhoodGraph(std::vector<std::vector<std::size_t>>{{5}}), std::invalid_argument);
  CHECK(parse_component_mode("weak") == ComponentMode::Weak);
  CHECK_THROWS(parse_component_mode("medium"));
}

TEST_CASE("strong components refine weak components") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(30);
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (rng.uniform() < 2.0 / static_cast<double>(n)) out[i].push_back(j);
      }
    }
    NeighborhoodGraph g(out);
    auto strong = extract_clusters(g, ComponentMode::Strong);
    auto weak = extract_clusters(g, ComponentMode::Weak);
    CHECK(oracle::refines(strong, weak));
    CHECK(is_refinement_of(strong, weak));
    // brute-force mutual reachability
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      reach[i][i] = true;
      for (std::size_t j : g.successors(i)) reach[i][j] = true;
    }
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][m] && reach[m][j]) reach[i][j] = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK((strong.labels[i] == strong.labels[j]) == (reach[i][j] && reach[j][i]));
      }
    }
  }
}

TEST_CASE("mahalanobis depth") {
  std::vector<double> identity{1, 0, 0, 1};
  std::vector<double> mean{2, 3};
  std::vector<double> at_mean{2, 3};
  std::vector<double> unit{3, 3};
  CHECK(mahalanobis_depth(at_mean, mean, identity) == 1.0);
  CHECK(mahalanobis_depth(unit, mean, identity) == doctest::Approx(0.5));
}

TEST_CASE("small cluster reassignment") {
  std::vector<std::vector<double>> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5},
                                       {10, 10}, {11, 10}, {10, 11}, {11, 11},
                                       {1.5, 0.5}, {9.5, 10.5}};
  PointCloud cloud(pts);
  Partition p{{0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 3}};
  CHECK(reassign_small_clusters(p, cloud, 1).labels == p.labels);
  auto r = reassign_small_clusters(p, cloud, 2);
  CHECK(r.labels == vec({0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1}));
  // members of surviving clusters keep their grouping
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK((p.labels[i] == p.labels[j]) == (r.labels[i] == r.labels[j]));
    }
  }
  CHECK_THROWS_AS(reassign_small_clusters(p, cloud, 6), std::invalid_argument);

  Partition noisy{{0, 0, 0, 0, 0, 1, 1, 1, 1, -1, -1}};
  CHECK(reassign_small_clusters(noisy, cloud, 2).labels == vec({0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1}));
}

TEST_CASE("reassignment handles degenerate clusters") {
  // a collinear survivor has a singular covariance
  PointCloud cloud({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {1.5, 0.1}, {50, 50}});
  Partition p{{0, 0, 0, 0, 1, 2}};
  auto r = reassign_small_clusters(p, cloud, 3);
  CHECK(r.labels == vec({0, 0, 0, 0, 0, 0}));
}

TEST_CASE("two separated blobs") {
  std::vector<int> truth;
  auto cloud = blobs(5, 150, 6.0, &truth);
  TuningParams params;
  params.min_cluster_size = 10;
  auto r = run_cbn(cloud, {}, 10, params);
  CHECK(r.tau0_auto);
  CHECK(r.tau1_auto);
  CHECK(r.partition.cluster_count() == 2);
  CHECK(rand_index(pair_counts(Partition{truth}, r.partition)) == 1.0);
}

TEST_CASE("one global neighborhood gives one cluster") {
  auto cloud = uniform_cloud(2, 15);
  auto r = run_cbn(cloud, {}, 15, {});
  CHECK(r.partition.cluster_count() == 1);
  CHECK(r.graph.edge_count() == 15 * 15);
}

TEST_CASE("refined clusters refine unrefined clusters") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto cloud = blobs(seed, 120, 1.5 + 0.3 * static_cast<double>(seed));
    TuningParams with;
    TuningParams without;
    without.refine = false;
    auto a = run_cbn(cloud, {}, 8, with);
    auto b = run_cbn(cloud, {}, 8, without);
    CHECK(is_refinement_of(a.partition, b.partition));
    CHECK(oracle::refines(a.partition, b.partition));
    CHECK(a.partition.cluster_count() >= b.partition.cluster_count());
  }
}

TEST_CASE("explicit taus and parameter errors") {
  auto cloud = uniform_cloud(3, 60);
  TuningParams fixed;
  fixed.tau0 = 0.3;
  fixed.tau1 = 0.4;
  auto r = run_cbn(cloud, {}, 6, fixed);
  CHECK_FALSE(r.tau0_auto);
  CHECK(r.taus.tau0 == 0.3);
  CHECK(r.taus.tau1 == 0.4);

  CHECK_THROWS_AS(run_cbn(cloud, {}, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_cbn(cloud, {}, 61, {}), std::invalid_argument);
  TuningParams negative;
  negative.tau0 = -1.0;
  CHECK_THROWS_AS(run_cbn(cloud, {}, 6, negative), std::invalid_argument);
}

TEST_CASE("results do not depend on point order or thread count") {
  auto cloud = blobs(9, 100, 2.0);
  auto base = run_cbn(cloud, {}, 9, {});

  std::vector<std::size_t> perm(cloud.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng(17);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
  std::vector<std::vector<double>> shuffled;
  for (auto idx : perm) {
    auto p = cloud.point(idx);
    shuffled.emplace_back(p.begin(), p.end());
  }
  auto moved = run_cbn(PointCloud(shuffled), {}, 9, {});
  CHECK(moved.taus.tau0 == doctest::Approx(base.taus.tau0).epsilon(1e-12));
  for (std::size_t a = 0; a < perm.size(); ++a) {
    for (std::size_t b = a + 1; b < perm.size(); ++b) {
      CHECK((moved.partition.labels[a] == moved.partition.labels[b]) ==
            (base.partition.labels[perm[a]] == base.partition.labels[perm[b]]));
    }
  }

  auto threaded = run_cbn(cloud, {}, 9, {}, ThresholdGrid::uniform(), 6);
  CHECK(threaded.partition.labels == base.partition.labels);
  CHECK(threaded.taus.tau0 == base.taus.tau0);
  CHECK(threaded.taus.tau1 == base.taus.tau1);
}
