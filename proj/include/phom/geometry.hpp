#pragma once

#include "phom/common.hpp"

namespace phom {

// Hole of the periodicity cell: nothing, or a regular polygon inscribed in a
// circle of the given radius centred at (1/2, 1/2). The first vertex sits on
// the ray pointing in +xi1, so the vertex set is invariant under both mirror
// reflections whenever the segment count is divisible by 4.
struct HoleSpec {
  enum class Kind { None, Disk };

  Kind kind = Kind::Disk;
  double radius = 0.25;
  int boundary_segments = 32;

  static HoleSpec none() { return {Kind::None, 0.0, 0}; }
  static HoleSpec disk(double r, int segments) { return {Kind::Disk, r, segments}; }

  bool empty() const { return kind == Kind::None; }
  void validate() const;
  // Vertex j relative to the cell centre.
  Vec2 polygon_vertex(int j) const;
  // Area of the polygonal hole: n r^2 sin(2 pi / n) / 2.
  double polygon_area() const;
  double cell_area() const { return 1.0 - (empty() ? 0.0 : polygon_area()); }
  // Signed distance from a cell-local point to the polygon boundary, negative inside the hole.
  double signed_distance(Vec2 p) const;
};

// Interface profile xi1 = l(xi2) with l(t) = -a sin^2(pi t).
struct InterfaceCurve {
  enum class Kind { Flat, Oscillating };

  Kind kind = Kind::Flat;
  double amplitude = 0.0;

  static InterfaceCurve flat_curve() { return {Kind::Flat, 0.0}; }
  static InterfaceCurve oscillating(double a) { return {Kind::Oscillating, a}; }

  bool flat() const { return kind == Kind::Flat || amplitude == 0.0; }
  void validate() const;
  double ell(double t) const;
  double dell(double t) const;
  double ddell(double t) const;
  // Arclength density sqrt(1 + l'(t)^2).
  double arclength_density(double t) const;
};

// Smallest signed distance between the curve (l(t), t), t in [0,1], and the
// hole boundaries of the full periodic lattice (including the lattice copies
// at xi1 < 0 that are not physically perforated). Negative when the curve
// passes through a lattice hole.
double lattice_clearance(const InterfaceCurve& curve, const HoleSpec& hole, int samples = 4096);

}  // namespace phom
