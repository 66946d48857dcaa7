#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phom/common.hpp"
#include "phom/geometry.hpp"

namespace phom {

using Edge = std::array<int, 2>;
using Tri = std::array<int, 3>;

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<Tri> triangles;  // counter-clockwise
  std::vector<Region> regions;
  std::map<std::string, std::vector<Edge>> edge_tags;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double area(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;
  double total_area() const;
  double region_area(Region r) const;
  // Empty list when the tag is absent.
  const std::vector<Edge>& edges(const std::string& tag) const;
  double tag_length(const std::string& tag) const;
};

// slave = master + shift for every pair.
struct PeriodicPairing {
  Vec2 shift;
  std::vector<std::pair<int, int>> pairs;
};

// Vertices duplicated across an internal line: (side A copy, side B copy).
struct InterfaceSplit {
  std::vector<std::pair<int, int>> pairs;
};

// Resolution of the cell template: m segments per cell side, n_radial layers
// between hole and cell boundary, angular = 4m points around the hole.
struct CellResolution {
  int m = 8;
  int n_radial = 4;
  int angular() const { return 4 * m; }
};

CellResolution cell_resolution(const HoleSpec& hole, double h_target);

struct CellMesh {
  TriMesh mesh;
  PeriodicPairing px;  // side_left -> side_right
  PeriodicPairing py;  // side_bottom -> side_top
  HoleSpec hole;
  CellResolution res;
};

CellMesh build_cell_mesh(const HoleSpec& hole, double h_target);

struct StripOptions {
  // Duplicate the vertices on xi1 = 0 between the solid sliver left of the
  // perforated cells and the first perforated cell (oscillating curves only).
  bool split_inner_line = true;
};

struct StripMesh {
  TriMesh mesh;
  PeriodicPairing py;
  int L_minus = 6;
  int L_plus = 6;
  HoleSpec hole;
  InterfaceCurve curve;
  CellResolution res;
  InterfaceSplit interface;  // (minus, plus) across the interface curve
  InterfaceSplit inner;      // (sliver, perforated) across xi1 = 0; empty unless split
};

StripMesh build_strip_mesh(int L_minus, int L_plus, const HoleSpec& hole, const InterfaceCurve& curve,
                           double h_target, StripOptions opts = {});

inline constexpr std::size_t kDefaultTriangleBudget = 4'000'000;

struct EpsMesh {
  TriMesh mesh;
  int N = 8;
  double d = 1.0;
  double left_extent = 1.0;
  double eps = 0.125;
  HoleSpec hole;
  InterfaceCurve curve;
  CellResolution res;
};

// h_cell is the physical mesh size target; the cell template is built with h_cell / eps.
EpsMesh build_eps_mesh(int N, double d, double left_extent, const HoleSpec& hole, const InterfaceCurve& curve,
                       double h_cell, std::size_t triangle_budget = kDefaultTriangleBudget);

struct MacroMesh {
  TriMesh mesh;
  double d = 1.0;
  double left_extent = 1.0;
  double h = 1.0 / 64;
  bool duplicated = false;
  InterfaceSplit split;  // (minus, plus) when duplicated
  // Structured grid: vertex (i, j) sits at x1 = xs[i], x2 = j d / ny, with
  // i = nx_minus on the interface (the minus copy when duplicated).
  int nx_minus = 0;
  int nx_plus = 0;
  int ny = 0;
  int grid_vertex(int i, int j) const { return j * (nx_minus + nx_plus + 1) + i; }
  double dx_minus() const { return left_extent / nx_minus; }
  double dx_plus() const { return d / nx_plus; }
  double dy() const { return d / ny; }
};

MacroMesh build_macro_mesh(double d, double left_extent, double h_target, bool duplicate_interface = false,
                           std::size_t triangle_budget = kDefaultTriangleBudget);

// Structural checks; throw InvariantError with a description on failure.
void check_conforming(const TriMesh& mesh);
void check_pairing(const TriMesh& mesh, const PeriodicPairing& p, double tol = 1e-12);

// For a reflection about x = c (axis 0) or y = c (axis 1), the vertex each
// vertex maps to, or -1 when no vertex sits at the mirrored position.
std::vector<int> mirror_map(const TriMesh& mesh, int axis, double c, double tol = 1e-12);

}  // namespace phom
