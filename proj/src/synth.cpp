#include "cbn/synth.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cbn/random.hpp"

namespace cbn {

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "disk") return ShapeKind::Disk;
  if (name == "annulus") return ShapeKind::Annulus;
  if (name == "rectangle") return ShapeKind::Rectangle;
  if (name == "crescent") return ShapeKind::Crescent;
  if (name == "sine_strip") return ShapeKind::SineStrip;
  throw std::invalid_argument(fmt::format("unknown shape kind '{}'", name));
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Disk: return "disk";
    case ShapeKind::Annulus: return "annulus";
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Crescent: return "crescent";
    case ShapeKind::SineStrip: return "sine_strip";
  }
  return "unknown";
}

namespace {

// Half extents of the local-frame bounding box.
std::array<double, 2> local_half_extent(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::Disk:
    case ShapeKind::Annulus:
    case ShapeKind::Crescent:
      return {s.scale, s.scale};
    case ShapeKind::Rectangle:
      return {s.scale / 2, s.aspect * s.scale / 2};
    case ShapeKind::SineStrip:
      return {s.scale / 2, s.amplitude * s.scale + s.aspect * s.scale / 2};
  }
  return {0.0, 0.0};
}

bool local_contains(const ShapeSpec& s, double u, double v) {
  const double r2 = u * u + v * v;
  switch (s.kind) {
    case ShapeKind::Disk:
      return r2 <= s.scale * s.scale;
    case ShapeKind::Annulus: {
      const double inner = s.inner * s.scale;
      return r2 <= s.scale * s.scale && r2 >= inner * inner;
    }
    case ShapeKind::Rectangle:
      return std::abs(u) <= s.scale / 2 && std::abs(v) <= s.aspect * s.scale / 2;
    case ShapeKind::Crescent: {
      const double cu = u - s.offset * s.scale;
      const double bite = s.inner * s.scale;
      return r2 <= s.scale * s.scale && cu * cu + v * v > bite * bite;
    }
    case ShapeKind::SineStrip: {
      if (std::abs(u) > s.scale / 2) return false;
      const double mid =
          s.amplitude * s.scale * std::sin(2.0 * std::numbers::pi * s.waves * u / s.scale);
      return std::abs(v - mid) <= s.aspect * s.scale / 2;
    }
  }
  return false;
}

}  // namespace

void ShapeSpec::validate() const {
  if (count < 1) throw std::invalid_argument("shape point count must be at least 1");
  if (!(scale > 0.0)) throw std::invalid_argument("shape scale must be positive");
  if (!std::isfinite(center[0]) || !std::isfinite(center[1]) || !std::isfinite(rotation)) {
    throw std::invalid_argument("shape placement must be finite");
  }
  switch (kind) {
    case ShapeKind::Annulus:
      if (!(inner >= 0.0 && inner < 1.0)) {
        throw std::invalid_argument("annulus inner radius must be below the outer radius");
      }
      break;
    case ShapeKind::Crescent:
      if (!(inner > 0.0 && inner < 1.0 + offset && offset >= 0.0)) {
        throw std::invalid_argument("crescent bite must be a nonempty proper cut");
      }
      if (offset + inner < 1.0) {
        throw std::invalid_argument("crescent bite must reach the outer rim");
      }
      break;
    case ShapeKind::Rectangle:
    case ShapeKind::SineStrip:
      if (!(aspect > 0.0)) throw std::invalid_argument("shape aspect must be positive");
      if (!(amplitude >= 0.0) || !(waves >= 0.0)) {
        throw std::invalid_argument("sine amplitude and waves must be nonnegative");
      }
      break;
    case ShapeKind::Disk:
      break;
  }
}

bool ShapeSpec::contains(double x, double y) const {
  const double dx = x - center[0];
  const double dy = y - center[1];
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return local_contains(*this, c * dx + s * dy, -s * dx + c * dy);
}

std::array<double, 4> ShapeSpec::bounds() const {
  const auto [hu, hv] = local_half_extent(*this);
  const double c = std::abs(std::cos(rotation));
  const double s = std::abs(std::sin(rotation));
  const double hx = c * hu + s * hv;
  const double hy = s * hu + c * hv;
  return {center[0] - hx, center[1] - hy, center[0] + hx, center[1] + hy};
}

SyntheticDataset generate(const std::vector<ShapeSpec>& specs, std::size_t noise_count,
                          const Box& box, std::uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("no shapes to generate");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) {
    throw std::invalid_argument("degenerate bounding box");
  }
  for (const auto& s : specs) {
    s.validate();
    const auto b = s.bounds();
    if (b[0] < box.xmin || b[1] < box.ymin || b[2] > box.xmax || b[3] > box.ymax) {
      throw std::invalid_argument(fmt::format("{} at ({}, {}) extends past the bounding box",
                                              to_string(s.kind), s.center[0], s.center[1]));
    }
  }

  Rng rng(seed);
  std::vector<double> coords;
  std::vector<int> labels;
  std::vector<bool> noise;
  for (std::size_t label = 0; label < specs.size(); ++label) {
    const auto& s = specs[label];
    const auto [hu, hv] = local_half_extent(s);
    const double c = std::cos(s.rotation);
    const double sn = std::sin(s.rotation);
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    while (accepted < s.count) {
      if (++attempts > 1000 * s.count + 100000) {
        throw std::runtime_error("rejection sampling failed: shape has negligible area");
      }
      const double u = rng.uniform(-hu, hu);
      const double v = rng.uniform(-hv, hv);
      if (!local_contains(s, u, v)) continue;
      coords.push_back(s.center[0] + c * u - sn * v);
      coords.push_back(s.center[1] + sn * u + c * v);
      labels.push_back(static_cast<int>(label));
      noise.push_back(false);
      ++accepted;
    }
  }
  for (std::size_t i = 0; i < noise_count; ++i) {
    coords.push_back(rng.uniform(box.xmin, box.xmax));
    coords.push_back(rng.uniform(box.ymin, box.ymax));
    labels.push_back(Partition::kNoise);
    noise.push_back(true);
  }

  SyntheticDataset dataset{PointCloud(2, std::move(coords)), Partition{std::move(labels)},
                           std::move(noise), seed};
  return dataset;
}

SyntheticDataset benchmark13(std::uint64_t seed, std::size_t noise_count) {
  return generate(benchmark13_shapes(), noise_count, benchmark13_box(), seed);
}

void write_dataset_csv(std::ostream& out, const SyntheticDataset& dataset) {
  out << "x,y,label,is_noise\n";
  for (std::size_t i = 0; i < dataset.cloud.size(); ++i) {
    const auto p = dataset.cloud.point(i);
    fmt::print(out, "{:.9g},{:.9g},{},{}\n", p[0], p[1], dataset.truth.labels[i],
               dataset.noise[i] ? 1 : 0);
  }
}

}  // namespace cbn
