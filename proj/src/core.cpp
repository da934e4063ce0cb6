#include "cbn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "cbn/parallel.hpp"

namespace cbn {

PointCloud::PointCloud(std::vector<std::vector<double>> points, std::vector<std::string> ids)
    : ids_(std::move(ids)) {
  if (points.empty()) throw std::invalid_argument("point cloud must contain at least one point");
  dimension_ = points.front().size();
  count_ = points.size();
  coords_.reserve(count_ * dimension_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dimension_) {
      throw std::invalid_argument(fmt::format(
          "dimension mismatch: point {} has {} coordinates, expected {}", i, points[i].size(),
          dimension_));
    }
    coords_.insert(coords_.end(), points[i].begin(), points[i].end());
  }
  validate();
}

PointCloud::PointCloud(std::size_t dimension, std::vector<double> coordinates,
                       std::vector<std::string> ids)
    : dimension_(dimension), coords_(std::move(coordinates)), ids_(std::move(ids)) {
  if (dimension_ == 0) throw std::invalid_argument("point dimension must be at least 1");
  if (coords_.size() % dimension_ != 0) {
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  }
  count_ = coords_.size() / dimension_;
  validate();
}

void PointCloud::validate() const {
  if (dimension_ == 0) throw std::invalid_argument("point dimension must be at least 1");
  if (count_ == 0) throw std::invalid_argument("point cloud must contain at least one point");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("point coordinates must be finite");
  }
  if (!ids_.empty()) {
    if (ids_.size() != count_) {
      throw std::invalid_argument(
          fmt::format("{} identifiers given for {} points", ids_.size(), count_));
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
      if (!seen.insert(id).second) {
        throw std::invalid_argument(fmt::format("duplicate point identifier '{}'", id));
      }
    }
  }
}

std::string PointCloud::id(std::size_t i) const {
  return ids_.empty() ? std::to_string(i) : ids_[i];
}

void DistanceMatrix::validate(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) {
      throw std::invalid_argument(fmt::format("distance matrix diagonal entry {} is not zero", i));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(
            fmt::format("distance matrix entry ({}, {}) must be finite and nonnegative", i, j));
      }
      if (j > i && std::abs(v - (*this)(j, i)) > tolerance) {
        throw std::invalid_argument(
            fmt::format("distance matrix is asymmetric at ({}, {})", i, j));
      }
    }
  }
}

DistanceKind parse_distance_kind(const std::string& name) {
  if (name == "euclidean") return DistanceKind::Euclidean;
  if (name == "manhattan") return DistanceKind::Manhattan;
  if (name == "chebyshev") return DistanceKind::Chebyshev;
  if (name == "precomputed") return DistanceKind::Precomputed;
  throw std::invalid_argument(fmt::format("unknown distance kind '{}'", name));
}

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::Manhattan: return "manhattan";
    case DistanceKind::Chebyshev: return "chebyshev";
    case DistanceKind::Precomputed: return "precomputed";
  }
  return "unknown";
}

double point_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch between points");
  double acc = 0.0;
  switch (kind) {
    case DistanceKind::Euclidean:
      for (std::size_t d = 0; d < a.size(); ++d) acc += (a[d] - b[d]) * (a[d] - b[d]);
      return std::sqrt(acc);
    case DistanceKind::Manhattan:
      for (std::size_t d = 0; d < a.size(); ++d) acc += std::abs(a[d] - b[d]);
      return acc;
    case DistanceKind::Chebyshev:
      for (std::size_t d = 0; d < a.size(); ++d) acc = std::max(acc, std::abs(a[d] - b[d]));
      return acc;
    case DistanceKind::Precomputed:
      break;
  }
  throw std::invalid_argument("precomputed distances have no coordinate formula");
}

DistanceMatrix build_distance_matrix(const PointCloud& cloud, const DistanceSpec& spec) {
  const std::size_t n = cloud.size();
  if (spec.kind == DistanceKind::Precomputed) {
    if (!spec.precomputed) {
      throw std::invalid_argument("precomputed distance kind requires a matrix");
    }
    if (spec.precomputed->size() != n) {
      throw std::invalid_argument(fmt::format("precomputed matrix is {}x{} but the cloud has {} points",
                                              spec.precomputed->size(), spec.precomputed->size(), n));
    }
    spec.precomputed->validate(1e-9);
    return *spec.precomputed;
  }
  if (spec.precomputed) {
    throw std::invalid_argument(
        fmt::format("distance kind '{}' does not accept a precomputed matrix", to_string(spec.kind)));
  }
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = point_distance(cloud.point(i), cloud.point(j), spec.kind);
      m(i, j) = d;
      m(j, i) = d;
    }
  }
  return m;
}

std::vector<Neighborhood> knn_neighborhoods(const DistanceMatrix& matrix, std::size_t k,
                                            unsigned threads) {
  const std::size_t n = matrix.size();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k > n) throw std::invalid_argument(fmt::format("k = {} exceeds the number of points {}", k, n));

  std::vector<Neighborhood> result(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    const auto row = matrix.row(i);
    auto closer = [&](std::size_t a, std::size_t b) {
      return row[a] < row[b] || (row[a] == row[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(),
                      closer);

    Neighborhood& nb = result[i];
    nb.center = i;
    nb.members.reserve(k);
    nb.members.push_back(i);
    nb.members.insert(nb.members.end(), order.begin(),
                      order.begin() + static_cast<std::ptrdiff_t>(k - 1));
    nb.pair_distances.reserve(k * (k - 1) / 2);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        nb.pair_distances.push_back(matrix(nb.members[a], nb.members[b]));
      }
    }
  });
  return result;
}

EcdfTransform::EcdfTransform(std::vector<double> pooled) : sorted_(std::move(pooled)) {
  if (sorted_.empty()) throw std::invalid_argument("ECDF requires at least one pooled distance");
  std::sort(sorted_.begin(), sorted_.end());
}

double EcdfTransform::operator()(double t) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

EcdfTransform fit_ecdf(const std::vector<Neighborhood>& neighborhoods) {
  std::size_t total = 0;
  for (const auto& nb : neighborhoods) total += nb.pair_distances.size();
  if (total == 0) {
    throw std::invalid_argument("all neighborhoods have empty pair-distance sets (k = 1)");
  }
  std::vector<double> pooled;
  pooled.reserve(total);
  for (const auto& nb : neighborhoods) {
    pooled.insert(pooled.end(), nb.pair_distances.begin(), nb.pair_distances.end());
  }
  return EcdfTransform(std::move(pooled));
}

DistanceMatrix transform_distances(DistanceMatrix matrix, const EcdfTransform& ecdf,
                                   unsigned threads) {
  const std::size_t n = matrix.size();
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      matrix(i, j) = (i == j) ? 0.0 : ecdf(matrix(i, j));
    }
  });
  return matrix;
}

}  // namespace cbn
