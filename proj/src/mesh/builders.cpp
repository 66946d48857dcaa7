// Template-based meshing: every domain is a tiling of unit cells, each cell
// filled from one of three patches (solid grid, O-grid around the hole, and
// the solid column carrying the interface curve). Shared cell sides carry
// identical vertex traces, so tiles merge into a conforming mesh.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "mesh_internal.hpp"
#include "phom/mesh.hpp"

namespace phom {
namespace {

enum Zone : int { kMinus = 0, kSliver = 1, kPlus = 2 };

struct Patch {
  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> zone;
};

void add_quad(Patch& p, int a, int b, int c, int d, bool main_diagonal, int zone) {
  // a=(i,j) b=(i+1,j) c=(i+1,j+1) d=(i,j+1)
  if (main_diagonal) {
    p.tris.push_back({a, b, c});
    p.tris.push_back({a, c, d});
  } else {
    p.tris.push_back({a, b, d});
    p.tris.push_back({b, c, d});
  }
  p.zone.push_back(zone);
  p.zone.push_back(zone);
}

// Union-jack split: diagonals point towards the patch centre in every
// quadrant, which keeps the triangulation invariant under both mirrors.
bool union_jack(int i, int j, int m) { return (2 * i < m) == (2 * j < m); }

Patch solid_patch(int m, int zone) {
  Patch p;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) p.pts.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});
  auto id = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      add_quad(p, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), union_jack(i, j, m), zone);
  return p;
}

// Point on the cell boundary for angular index t (4m per turn, t = 0 at (1, 1/2)),
// relative to the cell centre; built in the first quadrant and mirrored.
Vec2 outer_point(int t, int m) {
  const int M = 4 * m;
  t = ((t % M) + M) % M;
  auto first = [m](int s) -> Vec2 {
    if (2 * s <= m) return {0.5, static_cast<double>(s) / m};
    return {static_cast<double>(m - s) / m, 0.5};
  };
  if (t <= m) return first(t);
  if (t <= 2 * m) {
    const Vec2 c = first(2 * m - t);
    return {-c.x, c.y};
  }
  if (t <= 3 * m) {
    const Vec2 c = first(t - 2 * m);
    return {-c.x, -c.y};
  }
  const Vec2 c = first(M - t);
  return {c.x, -c.y};
}

// Point on the hole polygon for angular index t; polygon edges are subdivided uniformly.
Vec2 inner_point(int t, int m, const HoleSpec& hole) {
  const int M = 4 * m;
  const int S = hole.boundary_segments;
  auto first = [&](int s) -> Vec2 {
    const long long num = static_cast<long long>(s) * S;
    const int j0 = static_cast<int>(num / M);
    const double frac = static_cast<double>(num % M) / M;
    const Vec2 a = hole.polygon_vertex(j0);
    if (frac == 0.0) return a;
    const Vec2 b = hole.polygon_vertex(j0 + 1);
    return a + (b - a) * frac;
  };
  t = ((t % M) + M) % M;
  if (t <= m) return first(t);
  if (t <= 2 * m) {
    const Vec2 c = first(2 * m - t);
    return {-c.x, c.y};
  }
  if (t <= 3 * m) {
    const Vec2 c = first(t - 2 * m);
    return {-c.x, -c.y};
  }
  const Vec2 c = first(M - t);
  return {c.x, -c.y};
}

Patch perforated_patch(const HoleSpec& hole, const CellResolution& res) {
  if (hole.empty()) return solid_patch(res.m, kPlus);
  Patch p;
  const int M = res.angular();
  const int nr = res.n_radial;
  for (int t = 0; t < M; ++t) {
    const Vec2 a = inner_point(t, res.m, hole);
    const Vec2 b = outer_point(t, res.m);
    for (int k = 0; k <= nr; ++k) {
      const Vec2 c = (k == nr) ? b : a + (b - a) * (static_cast<double>(k) / nr);
      p.pts.push_back({0.5 + c.x, 0.5 + c.y});
    }
  }
  auto id = [nr, M](int t, int k) { return ((t % M + M) % M) * (nr + 1) + k; };
  for (int t = 0; t < M; ++t) {
    // Invariant under both mirrors and the diagonal swap.
    const bool main = (t % res.m) < res.m / 2;
    for (int k = 0; k < nr; ++k) add_quad(p, id(t, k), id(t + 1, k), id(t + 1, k + 1), id(t, k + 1), main, kPlus);
  }
  return p;
}

int sliver_columns(const InterfaceCurve& curve, int m) {
  if (curve.flat()) return 0;
  return std::clamp(static_cast<int>(std::lround(curve.amplitude * m)), 1, m - 1);
}

// Solid column [-1,0] x [0,1]. Flat curves give the plain grid; oscillating
// curves bend the grid so that one vertical line follows xi1 = l(xi2) and the
// columns to its right form the sliver l(xi2) < xi1 < 0.
Patch column_patch(int m, const InterfaceCurve& curve) {
  const int ns = sliver_columns(curve, m);
  if (ns == 0) {
    Patch p = solid_patch(m, kMinus);
    for (auto& q : p.pts) q.x -= 1.0;
    return p;
  }
  const int nm = m - ns;
  Patch p;
  for (int j = 0; j <= m; ++j) {
    const double y = static_cast<double>(j) / m;
    const double l = curve.ell(y);
    for (int i = 0; i <= m; ++i) {
      double x;
      if (i <= nm)
        x = -1.0 + (static_cast<double>(i) / nm) * (1.0 + l);
      else
        x = l * (1.0 - static_cast<double>(i - nm) / ns);
      p.pts.push_back({x, y});
    }
  }
  auto id = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      add_quad(p, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), union_jack(i, j, m),
               i < nm ? kMinus : kSliver);
  return p;
}

class Assembler {
 public:
  void add(const Patch& p, Vec2 offset) {
    std::vector<int> map(p.pts.size());
    for (std::size_t k = 0; k < p.pts.size(); ++k) {
      const Vec2 q = p.pts[k] + offset;
      int id = hash_.find(q, 1e-10);
      if (id < 0) {
        id = static_cast<int>(verts_.size());
        verts_.push_back(q);
        hash_.insert(q, id);
      }
      map[k] = id;
    }
    for (std::size_t t = 0; t < p.tris.size(); ++t) {
      Tri tri{map[p.tris[t][0]], map[p.tris[t][1]], map[p.tris[t][2]]};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;  // collapsed at a pinch point
      tris_.push_back(tri);
      zone_.push_back(p.zone[t]);
    }
  }

  TriMesh finish(std::vector<int>& zone_out) {
    TriMesh mesh;
    mesh.vertices = std::move(verts_);
    mesh.triangles = std::move(tris_);
    mesh.regions.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      double a = mesh.area(t);
      if (a < 0.0) {
        std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
        a = -a;
      }
      if (!(a > 1e-14)) throw GeometryError("mesh generation produced a degenerate triangle");
      mesh.regions[t] = zone_[t] == kMinus ? Region::Minus : Region::Plus;
    }
    zone_out = std::move(zone_);
    return mesh;
  }

 private:
  detail::PointHash hash_{1e-8};
  std::vector<Vec2> verts_;
  std::vector<Tri> tris_;
  std::vector<int> zone_;
};

// A mesh edge referenced through the triangle owning it.
struct TriEdge {
  int tri;
  int local;  // edge (tri[local], tri[local+1])
};

struct EdgeUse {
  std::vector<TriEdge> uses;
};

std::map<std::pair<int, int>, EdgeUse> edge_uses(const TriMesh& mesh) {
  std::map<std::pair<int, int>, EdgeUse> out;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][k];
      const int b = mesh.triangles[t][(k + 1) % 3];
      out[{std::min(a, b), std::max(a, b)}].uses.push_back({static_cast<int>(t), k});
    }
  return out;
}

Edge to_edge(const TriMesh& mesh, TriEdge e) {
  const auto& tri = mesh.triangles[e.tri];
  return {tri[e.local], tri[(e.local + 1) % 3]};
}

struct RecordedLine {
  std::vector<TriEdge> side_a;
  std::vector<TriEdge> side_b;
};

// Interior edges whose two triangles satisfy in_a / in_b respectively.
RecordedLine find_line(const TriMesh& mesh, const std::vector<int>& zone, const std::function<bool(int)>& in_a,
                       const std::function<bool(int)>& in_b) {
  RecordedLine line;
  for (const auto& [key, use] : edge_uses(mesh)) {
    if (use.uses.size() != 2) continue;
    TriEdge e0 = use.uses[0];
    TriEdge e1 = use.uses[1];
    if (in_a(zone[e1.tri]) && in_b(zone[e0.tri])) std::swap(e0, e1);
    if (in_a(zone[e0.tri]) && in_b(zone[e1.tri])) {
      line.side_a.push_back(e0);
      line.side_b.push_back(e1);
    }
  }
  return line;
}

// Duplicates every vertex of the recorded line; triangles on side B receive the copy.
InterfaceSplit split_line(TriMesh& mesh, const std::vector<int>& zone, const RecordedLine& line,
                          const std::function<bool(int)>& in_b) {
  std::set<int> verts;
  for (const auto& e : line.side_a) {
    const Edge ed = to_edge(mesh, e);
    verts.insert(ed[0]);
    verts.insert(ed[1]);
  }
  std::vector<std::vector<int>> incident(mesh.vertices.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t])
      if (verts.count(v)) incident[v].push_back(static_cast<int>(t));
  InterfaceSplit split;
  for (int v : verts) {
    const int copy = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(mesh.vertices[v]);
    bool used = false;
    for (int t : incident[v]) {
      if (!in_b(zone[t])) continue;
      for (int& w : mesh.triangles[t])
        if (w == v) w = copy;
      used = true;
    }
    if (!used) throw InvariantError("interface vertex without a triangle on the far side");
    split.pairs.push_back({v, copy});
  }
  return split;
}

std::vector<Edge> edges_of(const TriMesh& mesh, const std::vector<TriEdge>& list) {
  std::vector<Edge> out;
  out.reserve(list.size());
  for (const auto& e : list) out.push_back(to_edge(mesh, e));
  return out;
}

// Boundary edges not already recorded are named by `classify`.
void tag_boundary(TriMesh& mesh, const std::set<std::pair<int, int>>& skip,
                  const std::function<std::string(Vec2, Vec2)>& classify) {
  for (const auto& [key, use] : edge_uses(mesh)) {
    if (use.uses.size() != 1) continue;
    if (skip.count(key)) continue;
    const Edge e = to_edge(mesh, use.uses[0]);
    const std::string name = classify(mesh.vertices[e[0]], mesh.vertices[e[1]]);
    if (!name.empty()) mesh.edge_tags[name].push_back(e);
  }
}

std::set<std::pair<int, int>> key_set(const std::vector<Edge>& a) {
  std::set<std::pair<int, int>> s;
  for (const auto& e : a) s.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
  return s;
}

PeriodicPairing pair_sides(const TriMesh& mesh, int axis, double lo, double hi, double tol) {
  const auto masks = detail::vertex_zone_masks(mesh);
  PeriodicPairing pp;
  pp.shift = axis == 0 ? Vec2{hi - lo, 0.0} : Vec2{0.0, hi - lo};
  detail::PointHash slaves;
  std::vector<int> masters;
  std::size_t n_slaves = 0;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const double c = mesh.vertices[v][axis];
    if (std::abs(c - lo) <= tol) masters.push_back(static_cast<int>(v));
    if (std::abs(c - hi) <= tol) {
      slaves.insert(mesh.vertices[v], static_cast<int>(v), masks[v]);
      ++n_slaves;
    }
  }
  for (int v : masters) {
    const int s = slaves.find(mesh.vertices[v] + pp.shift, tol, masks[v]);
    if (s < 0) throw InvariantError("periodic side traces do not match");
    pp.pairs.push_back({v, s});
  }
  if (pp.pairs.size() != n_slaves) throw InvariantError("periodic sides carry different vertex counts");
  return pp;
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::size_t perforated_tris(const HoleSpec& hole, const CellResolution& res) {
  return hole.empty() ? 2u * res.m * res.m : 2u * res.angular() * res.n_radial;
}

void check_budget(std::size_t estimate, std::size_t budget) {
  if (estimate > budget)
    throw GeometryError("mesh would have about " + std::to_string(estimate) + " triangles, above the budget of " +
                        std::to_string(budget));
}

void check_physical_clearance(const InterfaceCurve& curve, const HoleSpec& hole) {
  curve.validate();
  if (curve.flat() || hole.empty()) return;
  // The curve lives in the solid column xi1 in (-1, 0]; only the holes of the
  // first perforated column can come close.
  for (int k = 0; k <= 2048; ++k) {
    const double t = k / 2048.0;
    for (int cy = -1; cy <= 1; ++cy)
      if (hole.signed_distance({curve.ell(t), t - cy}) <= 0.0)
        throw GeometryError("interface curve intersects a hole boundary");
  }
}

}  // namespace

CellResolution cell_resolution(const HoleSpec& hole, double h_target) {
  if (!(h_target > 0.0) || h_target > 0.25) throw GeometryError("h_target must lie in (0, 0.25]");
  CellResolution r;
  int step = 2;
  if (!hole.empty()) step = std::lcm(2, hole.boundary_segments / 4);
  const int want = static_cast<int>(std::ceil(1.0 / h_target - 1e-9));
  r.m = std::max(step, ((want + step - 1) / step) * step);
  if (!hole.empty()) {
    const double reach = std::sqrt(0.5) - hole.radius;
    r.n_radial = std::max(1, static_cast<int>(std::ceil(reach / h_target - 1e-9)));
  } else {
    r.n_radial = 0;
  }
  return r;
}

CellMesh build_cell_mesh(const HoleSpec& hole, double h_target) {
  hole.validate();
  CellMesh out;
  out.hole = hole;
  out.res = cell_resolution(hole, h_target);
  Assembler as;
  as.add(perforated_patch(hole, out.res), {0.0, 0.0});
  std::vector<int> zone;
  out.mesh = as.finish(zone);
  tag_boundary(out.mesh, {}, [](Vec2 a, Vec2 b) -> std::string {
    if (near(a.x, 0.0) && near(b.x, 0.0)) return "side_left";
    if (near(a.x, 1.0) && near(b.x, 1.0)) return "side_right";
    if (near(a.y, 0.0) && near(b.y, 0.0)) return "side_bottom";
    if (near(a.y, 1.0) && near(b.y, 1.0)) return "side_top";
    return "hole";
  });
  out.px = pair_sides(out.mesh, 0, 0.0, 1.0, 1e-12);
  out.py = pair_sides(out.mesh, 1, 0.0, 1.0, 1e-12);
  check_conforming(out.mesh);
  return out;
}

StripMesh build_strip_mesh(int L_minus, int L_plus, const HoleSpec& hole, const InterfaceCurve& curve,
                           double h_target, StripOptions opts) {
  hole.validate();
  if (L_minus < 3 || L_plus < 3) throw GeometryError("strip truncation needs at least 3 cells per side");
  check_physical_clearance(curve, hole);
  StripMesh out;
  out.L_minus = L_minus;
  out.L_plus = L_plus;
  out.hole = hole;
  out.curve = curve;
  out.res = cell_resolution(hole, h_target);
  const int m = out.res.m;

  Assembler as;
  const Patch solid = solid_patch(m, kMinus);
  const Patch column = column_patch(m, curve);
  const Patch perforated = perforated_patch(hole, out.res);
  for (int k = -L_minus; k <= -2; ++k) as.add(solid, {static_cast<double>(k), 0.0});
  as.add(column, {0.0, 0.0});
  for (int k = 0; k < L_plus; ++k) as.add(perforated, {static_cast<double>(k), 0.0});
  std::vector<int> zone;
  TriMesh mesh = as.finish(zone);

  auto is_minus = [](int z) { return z == kMinus; };
  auto is_plus = [](int z) { return z != kMinus; };
  auto is_sliver = [](int z) { return z == kSliver; };
  auto is_bulk = [](int z) { return z == kPlus; };

  const RecordedLine iface = find_line(mesh, zone, is_minus, is_plus);
  const RecordedLine inner_line = find_line(mesh, zone, is_sliver, is_bulk);
  out.interface = split_line(mesh, zone, iface, is_plus);
  const bool split_inner = !curve.flat() && opts.split_inner_line;
  if (split_inner) out.inner = split_line(mesh, zone, inner_line, is_bulk);

  mesh.edge_tags["interface"] = edges_of(mesh, iface.side_a);
  mesh.edge_tags["interface_plus"] = edges_of(mesh, iface.side_b);
  std::set<std::pair<int, int>> skip = key_set(mesh.edge_tags["interface"]);
  for (const auto& k : key_set(mesh.edge_tags["interface_plus"])) skip.insert(k);
  if (!curve.flat()) {
    mesh.edge_tags["inner"] = edges_of(mesh, inner_line.side_a);
    if (split_inner) {
      mesh.edge_tags["inner_plus"] = edges_of(mesh, inner_line.side_b);
      for (const auto& k : key_set(mesh.edge_tags["inner"])) skip.insert(k);
      for (const auto& k : key_set(mesh.edge_tags["inner_plus"])) skip.insert(k);
    }
  }
  const double xl = -L_minus;
  const double xr = L_plus;
  tag_boundary(mesh, skip, [xl, xr](Vec2 a, Vec2 b) -> std::string {
    if (near(a.x, xl) && near(b.x, xl)) return "end_left";
    if (near(a.x, xr) && near(b.x, xr)) return "end_right";
    if (near(a.y, 0.0) && near(b.y, 0.0)) return "periodic_bottom";
    if (near(a.y, 1.0) && near(b.y, 1.0)) return "periodic_top";
    return "hole";
  });
  out.mesh = std::move(mesh);
  out.py = pair_sides(out.mesh, 1, 0.0, 1.0, 1e-12);
  check_conforming(out.mesh);
  return out;
}

EpsMesh build_eps_mesh(int N, double d, double left_extent, const HoleSpec& hole, const InterfaceCurve& curve,
                       double h_cell, std::size_t triangle_budget) {
  hole.validate();
  if (N < 2) throw GeometryError("N must be at least 2");
  if (!(d > 0.0) || !(left_extent > 0.0)) throw GeometryError("domain extents must be positive");
  check_physical_clearance(curve, hole);
  EpsMesh out;
  out.N = N;
  out.d = d;
  out.left_extent = left_extent;
  out.eps = d / N;
  out.hole = hole;
  out.curve = curve;
  out.res = cell_resolution(hole, std::min(0.25, h_cell / out.eps));
  if (!hole.empty() && out.res.angular() < 8) throw GeometryError("hole boundary needs at least 8 edges");
  const double nl_real = left_extent / out.eps;
  const int nL = static_cast<int>(std::lround(nl_real));
  if (nL < 1 || std::abs(nl_real - nL) > 1e-9 * std::max(1.0, nl_real))
    throw GeometryError("left_extent must be a whole number of cells of size d/N");
  const int m = out.res.m;
  const std::size_t estimate = static_cast<std::size_t>(N) * N * perforated_tris(hole, out.res) +
                               static_cast<std::size_t>(nL) * N * 2u * m * m;
  check_budget(estimate, triangle_budget);

  Assembler as;
  const Patch solid = solid_patch(m, kMinus);
  const Patch column = column_patch(m, curve);
  const Patch perforated = perforated_patch(hole, out.res);
  for (int j = 0; j < N; ++j) {
    for (int k = -nL; k <= -2; ++k) as.add(solid, {static_cast<double>(k), static_cast<double>(j)});
    as.add(column, {0.0, static_cast<double>(j)});
    for (int k = 0; k < N; ++k) as.add(perforated, {static_cast<double>(k), static_cast<double>(j)});
  }
  std::vector<int> zone;
  TriMesh mesh = as.finish(zone);
  const RecordedLine iface =
      find_line(mesh, zone, [](int z) { return z == kMinus; }, [](int z) { return z != kMinus; });
  mesh.edge_tags["interface"] = edges_of(mesh, iface.side_a);
  const double xl = -nL;
  const double xr = N;
  const double yt = N;
  tag_boundary(mesh, {}, [xl, xr, yt](Vec2 a, Vec2 b) -> std::string {
    const bool outer = (near(a.x, xl) && near(b.x, xl)) || (near(a.x, xr) && near(b.x, xr)) ||
                       (near(a.y, 0.0) && near(b.y, 0.0)) || (near(a.y, yt) && near(b.y, yt));
    return outer ? "dirichlet" : "hole";
  });
  for (auto& v : mesh.vertices) v = v * out.eps;
  out.mesh = std::move(mesh);
  check_conforming(out.mesh);
  return out;
}

MacroMesh build_macro_mesh(double d, double left_extent, double h_target, bool duplicate_interface,
                           std::size_t triangle_budget) {
  if (!(d > 0.0) || !(left_extent > 0.0) || !(h_target > 0.0)) throw GeometryError("invalid macro mesh parameters");
  MacroMesh out;
  out.d = d;
  out.left_extent = left_extent;
  out.h = h_target;
  out.duplicated = duplicate_interface;
  const int nxm = std::max(1, static_cast<int>(std::lround(left_extent / h_target)));
  const int nxp = std::max(1, static_cast<int>(std::lround(d / h_target)));
  const int ny = std::max(1, static_cast<int>(std::lround(d / h_target)));
  check_budget(2u * static_cast<std::size_t>(nxm + nxp) * ny, triangle_budget);
  const int nx = nxm + nxp;
  out.nx_minus = nxm;
  out.nx_plus = nxp;
  out.ny = ny;

  TriMesh mesh;
  std::vector<double> xs(nx + 1);
  for (int i = 0; i <= nx; ++i)
    xs[i] = i <= nxm ? -left_extent + left_extent * static_cast<double>(i) / nxm
                     : d * static_cast<double>(i - nxm) / nxp;
  xs[nxm] = 0.0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({xs[i], d * static_cast<double>(j) / ny});
  std::vector<int> zone;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int z = i < nxm ? kMinus : kPlus;
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      zone.push_back(z);
      zone.push_back(z);
    }
  mesh.regions.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < zone.size(); ++t) mesh.regions[t] = zone[t] == kMinus ? Region::Minus : Region::Plus;

  const RecordedLine iface =
      find_line(mesh, zone, [](int z) { return z == kMinus; }, [](int z) { return z != kMinus; });
  std::set<std::pair<int, int>> skip;
  if (duplicate_interface) {
    out.split = split_line(mesh, zone, iface, [](int z) { return z != kMinus; });
    mesh.edge_tags["interface"] = edges_of(mesh, iface.side_a);
    mesh.edge_tags["interface_plus"] = edges_of(mesh, iface.side_b);
    skip = key_set(mesh.edge_tags["interface"]);
    for (const auto& k : key_set(mesh.edge_tags["interface_plus"])) skip.insert(k);
  } else {
    mesh.edge_tags["interface"] = edges_of(mesh, iface.side_a);
  }
  tag_boundary(mesh, skip, [](Vec2, Vec2) -> std::string { return "dirichlet"; });
  out.mesh = std::move(mesh);
  check_conforming(out.mesh);
  return out;
}

}  // namespace phom
