#pragma once

// Test bodies shared by the unit tests and the acceptance run.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "equipart/equalize_fn.hpp"
#include "equipart/geom2d.hpp"

namespace corpus {

inline equipart::ConvexPolygon square() { return equipart::ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0); }

inline equipart::ConvexPolygon triangle() { return equipart::ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {0, 1}}); }

// Nine points on a rotated ellipse about (0.5, 0.5), angles jittered by a
// fixed-seed generator.
inline equipart::ConvexPolygon nonagon() {
  equipart::Rng rng(9);
  std::vector<equipart::Point2> pts;
  const double step = 2.0 * std::numbers::pi / 9.0;
  const double rot = 0.3;
  for (int k = 0; k < 9; ++k) {
    const double a = step * k + equipart::uniform(rng, -0.25, 0.25) * step;
    const double x = 0.48 * std::cos(a), y = 0.33 * std::sin(a);
    pts.push_back({0.5 + x * std::cos(rot) - y * std::sin(rot), 0.5 + x * std::sin(rot) + y * std::cos(rot)});
  }
  return equipart::ConvexPolygon::from_vertices(std::move(pts));
}

inline equipart::ConvexPolygon disk() { return equipart::ConvexPolygon::regular(256, {0.5, 0.5}, 0.5); }

struct Body {
  std::string name;
  equipart::ConvexPolygon polygon;
};

inline std::vector<Body> all() {
  return {{"square", square()}, {"triangle", triangle()}, {"nonagon", nonagon()}, {"disk", disk()}};
}

}  // namespace corpus
