#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbn {

/// Ordered set of n points in R^m, stored row-major.
/// Identifiers are optional; when present they are unique.
class PointCloud {
 public:
  PointCloud(std::vector<std::vector<double>> points,
             std::vector<std::string> ids = {});
  PointCloud(std::size_t dimension, std::vector<double> coordinates,
             std::vector<std::string> ids = {});

  std::size_t size() const { return count_; }
  std::size_t dimension() const { return dimension_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dimension_, dimension_};
  }
  const std::vector<double>& coordinates() const { return coords_; }

  bool has_ids() const { return !ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  /// Identifier of point i, or its decimal index when the cloud is anonymous.
  std::string id(std::size_t i) const;

 private:
  void validate() const;

  std::size_t dimension_ = 0;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  std::vector<std::string> ids_;
};

/// Dense symmetric n x n matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

  /// Checks shape, finiteness, nonnegativity, zero diagonal and symmetry
  /// within `tolerance`. Throws std::invalid_argument on the first violation.
  void validate(double tolerance = 1e-9) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

enum class DistanceKind { Euclidean, Manhattan, Chebyshev, Precomputed };

struct DistanceSpec {
  DistanceKind kind = DistanceKind::Euclidean;
  std::optional<DistanceMatrix> precomputed;

  static DistanceSpec from_matrix(DistanceMatrix matrix) {
    return {DistanceKind::Precomputed, std::move(matrix)};
  }
};

DistanceKind parse_distance_kind(const std::string& name);
std::string to_string(DistanceKind kind);

double point_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind);

DistanceMatrix build_distance_matrix(const PointCloud& cloud, const DistanceSpec& spec);

/// The k nearest points to `center`, center first and the rest by
/// nondecreasing distance with ties broken by ascending index.
struct Neighborhood {
  std::size_t center = 0;
  std::vector<std::size_t> members;
  /// Distances of all unordered member pairs (a < b in member order).
  std::vector<double> pair_distances;
};

std::vector<Neighborhood> knn_neighborhoods(const DistanceMatrix& matrix, std::size_t k,
                                            unsigned threads = 1);

/// Pooled empirical CDF of the within-neighborhood distances.
class EcdfTransform {
 public:
  explicit EcdfTransform(std::vector<double> pooled);

  /// Fraction of pooled values <= t.
  double operator()(double t) const;
  std::size_t pool_size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EcdfTransform fit_ecdf(const std::vector<Neighborhood>& neighborhoods);

/// Elementwise F(d) off the diagonal; the diagonal stays 0.
DistanceMatrix transform_distances(DistanceMatrix matrix, const EcdfTransform& ecdf,
                                   unsigned threads = 1);

}  // namespace cbn
