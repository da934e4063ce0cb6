#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbn/core.hpp"
#include "cbn/partition.hpp"

namespace cbn {

enum class ShapeKind { Disk, Annulus, Rectangle, Crescent, SineStrip };

ShapeKind parse_shape_kind(const std::string& name);
std::string to_string(ShapeKind kind);

/// A planar region sampled uniformly. Geometry in the shape's local frame
/// (rotated by `rotation` radians, then translated to `center`):
///   Disk       radius = scale
///   Annulus    outer radius = scale, inner radius = inner * scale
///   Rectangle  width = scale, height = aspect * scale
///   Crescent   disk of radius scale minus a disk of radius inner * scale
///              centred at (offset * scale, 0)
///   SineStrip  y = amplitude * scale * sin(2 pi waves x / scale) for
///              |x| <= scale / 2, thickened to total height aspect * scale
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Disk;
  std::array<double, 2> center{0.0, 0.0};
  double scale = 1.0;
  double rotation = 0.0;
  std::size_t count = 1;
  double inner = 0.5;
  double offset = 0.5;
  double aspect = 0.5;
  double amplitude = 0.2;
  double waves = 1.0;

  void validate() const;
  bool contains(double x, double y) const;
  /// Axis-aligned bounding box {xmin, ymin, xmax, ymax} of the placed shape.
  std::array<double, 4> bounds() const;
};

struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;
};

struct SyntheticDataset {
  PointCloud cloud{std::vector<std::vector<double>>{{0.0, 0.0}}};
  /// Shape index per point; noise points carry Partition::kNoise.
  Partition truth;
  std::vector<bool> noise;
  std::uint64_t seed = 0;
};

/// Rejection-samples each shape uniformly in order, then appends
/// `noise_count` points uniform in `box`. Deterministic per seed.
SyntheticDataset generate(const std::vector<ShapeSpec>& specs, std::size_t noise_count,
                          const Box& box, std::uint64_t seed);

/// Fixed layout of 13 shapes totalling 3800 points.
std::vector<ShapeSpec> benchmark13_shapes();
Box benchmark13_box();
SyntheticDataset benchmark13(std::uint64_t seed, std::size_t noise_count = 0);

/// CSV with header `x,y,label,is_noise`, coordinates to 9 significant digits.
void write_dataset_csv(std::ostream& out, const SyntheticDataset& dataset);

}  // namespace cbn
