#include <numbers>

#include "cbn/synth.hpp"

namespace cbn {
namespace {

ShapeSpec disk(double x, double y, double r, std::size_t count) {
  ShapeSpec s;
  s.kind = ShapeKind::Disk;
  s.center = {x, y};
  s.scale = r;
  s.count = count;
  return s;
}

ShapeSpec rectangle(double x, double y, double width, double aspect, double rotation,
                    std::size_t count) {
  ShapeSpec s;
  s.kind = ShapeKind::Rectangle;
  s.center = {x, y};
  s.scale = width;
  s.aspect = aspect;
  s.rotation = rotation;
  s.count = count;
  return s;
}

ShapeSpec annulus(double x, double y, double r, double inner, std::size_t count) {
  ShapeSpec s = disk(x, y, r, count);
  s.kind = ShapeKind::Annulus;
  s.inner = inner;
  return s;
}

ShapeSpec crescent(double x, double y, double r, double inner, double offset, double rotation,
                   std::size_t count) {
  ShapeSpec s = disk(x, y, r, count);
  s.kind = ShapeKind::Crescent;
  s.inner = inner;
  s.offset = offset;
  s.rotation = rotation;
  return s;
}

}  // namespace

// A face: eyes, brows, nose, mouth, cheeks, hair, ears and a mole.
std::vector<ShapeSpec> benchmark13_shapes() {
  constexpr double pi = std::numbers::pi;
  ShapeSpec hair;
  hair.kind = ShapeKind::SineStrip;
  hair.center = {60.0, 85.0};
  hair.scale = 60.0;
  hair.aspect = 0.0667;
  hair.amplitude = 0.04;
  hair.waves = 2.0;
  hair.count = 650;

  return {
      disk(45.0, 60.0, 5.0, 240),                             // left eye
      disk(75.0, 60.0, 5.0, 240),                             // right eye
      rectangle(45.0, 68.5, 14.0, 0.2143, 0.0, 200),          // left brow
      rectangle(75.0, 68.5, 14.0, 0.2143, 0.0, 200),          // right brow
      rectangle(60.0, 50.0, 14.0, 0.2857, pi / 2, 170),       // nose
      crescent(60.0, 36.0, 12.0, 0.9167, 0.3, pi / 2, 300),   // mouth
      annulus(38.0, 42.0, 6.0, 0.5, 250),                     // left cheek
      annulus(82.0, 42.0, 6.0, 0.5, 250),                     // right cheek
      hair,
      rectangle(60.0, 18.0, 24.0, 0.1667, 0.0, 290),          // chin
      crescent(18.0, 55.0, 8.0, 0.8, 0.5, 0.0, 300),          // left ear
      crescent(102.0, 55.0, 8.0, 0.8, 0.5, pi, 300),          // right ear
      disk(100.0, 85.0, 7.0, 410),                            // mole
  };
}

Box benchmark13_box() { return {0.0, 0.0, 130.0, 100.0}; }

}  // namespace cbn
