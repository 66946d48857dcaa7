#include "phom/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace phom {

void HoleSpec::validate() const {
  if (kind == Kind::None) return;
  if (!(radius > 0.0) || radius >= 0.5)
    throw GeometryError("hole radius must lie in (0, 0.5), got " + std::to_string(radius));
  if (boundary_segments < 4 || boundary_segments % 4 != 0)
    throw GeometryError("hole boundary_segments must be a positive multiple of 4, got " +
                        std::to_string(boundary_segments));
}

Vec2 HoleSpec::polygon_vertex(int j) const {
  const int n = boundary_segments;
  j = ((j % n) + n) % n;
  // Build the first quadrant and mirror it, so reflected vertices agree to the last bit.
  const int q = n / 4;
  int base = j;
  double sx = 1.0;
  double sy = 1.0;
  if (j > q && j <= 2 * q) {
    base = 2 * q - j;
    sx = -1.0;
  } else if (j > 2 * q && j <= 3 * q) {
    base = j - 2 * q;
    sx = -1.0;
    sy = -1.0;
  } else if (j > 3 * q) {
    base = n - j;
    sy = -1.0;
  }
  // Within the quadrant use the diagonal symmetry too.
  double c;
  double s;
  if (2 * base <= q) {
    const double th = 2.0 * std::numbers::pi * base / n;
    c = std::cos(th);
    s = std::sin(th);
  } else {
    const double th = 2.0 * std::numbers::pi * (q - base) / n;
    c = std::sin(th);
    s = std::cos(th);
  }
  if (base == 0) s = 0.0;
  if (base == q) c = 0.0;
  return {sx * radius * c, sy * radius * s};
}

double HoleSpec::polygon_area() const {
  if (empty()) return 0.0;
  const double n = boundary_segments;
  return 0.5 * n * radius * radius * std::sin(2.0 * std::numbers::pi / n);
}

double HoleSpec::signed_distance(Vec2 p) const {
  if (empty()) return std::numeric_limits<double>::infinity();
  const Vec2 c{p.x - 0.5, p.y - 0.5};
  double dmin = std::numeric_limits<double>::infinity();
  bool inside = true;
  for (int j = 0; j < boundary_segments; ++j) {
    const Vec2 a = polygon_vertex(j);
    const Vec2 b = polygon_vertex(j + 1);
    const Vec2 e = b - a;
    const double t = std::clamp(dot(c - a, e) / dot(e, e), 0.0, 1.0);
    dmin = std::min(dmin, norm(c - (a + e * t)));
    if (cross(e, c - a) < 0.0) inside = false;
  }
  return inside ? -dmin : dmin;
}

void InterfaceCurve::validate() const {
  if (kind == Kind::Flat) return;
  if (!(amplitude >= 0.0) || amplitude >= 1.0)
    throw GeometryError("interface amplitude must lie in [0, 1), got " + std::to_string(amplitude));
}

double InterfaceCurve::ell(double t) const {
  if (flat()) return 0.0;
  const double s = std::sin(std::numbers::pi * t);
  return -amplitude * s * s;
}

double InterfaceCurve::dell(double t) const {
  if (flat()) return 0.0;
  return -amplitude * std::numbers::pi * std::sin(2.0 * std::numbers::pi * t);
}

double InterfaceCurve::ddell(double t) const {
  if (flat()) return 0.0;
  return -2.0 * amplitude * std::numbers::pi * std::numbers::pi * std::cos(2.0 * std::numbers::pi * t);
}

double InterfaceCurve::arclength_density(double t) const {
  const double d = dell(t);
  return std::sqrt(1.0 + d * d);
}

double lattice_clearance(const InterfaceCurve& curve, const HoleSpec& hole, int samples) {
  if (hole.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double x = curve.ell(t);
    // The curve lies in xi1 <= 0; test the lattice cells it can touch.
    for (int cx = -1; cx <= 0; ++cx) {
      for (int cy = -1; cy <= 1; ++cy) {
        best = std::min(best, hole.signed_distance({x - cx, t - cy}));
      }
    }
  }
  return best;
}

}  // namespace phom
