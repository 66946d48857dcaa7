#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "phom/mesh.hpp"
#include "mesh_internal.hpp"

namespace phom {

double TriMesh::area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

Vec2 TriMesh::centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) * (1.0 / 3.0);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += area(t);
  return s;
}

double TriMesh::region_area(Region r) const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    if (regions[t] == r) s += area(t);
  return s;
}

const std::vector<Edge>& TriMesh::edges(const std::string& tag) const {
  static const std::vector<Edge> empty;
  auto it = edge_tags.find(tag);
  return it == edge_tags.end() ? empty : it->second;
}

double TriMesh::tag_length(const std::string& tag) const {
  double s = 0.0;
  for (const auto& e : edges(tag)) s += norm(vertices[e[1]] - vertices[e[0]]);
  return s;
}

void check_conforming(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (!(mesh.area(t) > 0.0)) throw InvariantError("triangle " + std::to_string(t) + " has non-positive area");
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [e, c] : count)
    if (c > 2) throw InvariantError("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                                    ") is shared by " + std::to_string(c) + " triangles");
  for (const auto& [name, list] : mesh.edge_tags) {
    for (const auto& e : list) {
      auto it = count.find({std::min(e[0], e[1]), std::max(e[0], e[1])});
      if (it == count.end()) throw InvariantError("tagged edge in '" + name + "' is not a mesh edge");
    }
  }
}

void check_pairing(const TriMesh& mesh, const PeriodicPairing& p, double tol) {
  std::set<int> masters;
  std::set<int> slaves;
  for (const auto& [m, s] : p.pairs) {
    const Vec2 d = mesh.vertices[s] - mesh.vertices[m] - p.shift;
    if (std::abs(d.x) > tol || std::abs(d.y) > tol)
      throw InvariantError("periodic pair does not differ by the lattice vector");
    if (!masters.insert(m).second || !slaves.insert(s).second)
      throw InvariantError("periodic pairing is not a bijection");
  }
}

std::vector<int> mirror_map(const TriMesh& mesh, int axis, double c, double tol) {
  const auto masks = detail::vertex_zone_masks(mesh);
  detail::PointHash hash;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) hash.insert(mesh.vertices[v], static_cast<int>(v), masks[v]);
  std::vector<int> out(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    Vec2 p = mesh.vertices[v];
    if (axis == 0)
      p.x = 2.0 * c - p.x;
    else
      p.y = 2.0 * c - p.y;
    out[v] = hash.find(p, tol, masks[v]);
  }
  return out;
}

namespace detail {

std::vector<unsigned> vertex_zone_masks(const TriMesh& mesh) {
  std::vector<unsigned> mask(mesh.vertices.size(), 0u);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    unsigned bit;
    if (mesh.regions[t] == Region::Minus)
      bit = 1u;
    else
      bit = mesh.centroid(t).x < 0.0 ? 2u : 4u;
    for (int v : mesh.triangles[t]) mask[v] |= bit;
  }
  return mask;
}

}  // namespace detail

}  // namespace phom
