#include <cmath>
#include <vector>

#include "phom/fem.hpp"

namespace phom {

void DiffusionTensor::validate() const {
  for (double a : {minus[0], minus[1], plus[0], plus[1]})
    if (!(a > 0.0) || !std::isfinite(a)) throw ModelError("diffusion tensor entries must be positive");
}

std::array<Vec2, 3> midedge_points(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  return {(a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5};
}

std::array<Vec2, 3> hat_gradients(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  const double twice = cross(b - a, c - a);
  if (!(std::abs(twice) > 0.0)) throw AssemblyError("degenerate triangle " + std::to_string(t));
  const double s = 1.0 / twice;
  // grad phi_k = rot90(opposite edge) / (2|T|)
  return {Vec2{b.y - c.y, c.x - b.x} * s, Vec2{c.y - a.y, a.x - c.x} * s, Vec2{a.y - b.y, b.x - a.x} * s};
}

SpMat assemble_stiffness(const TriMesh& mesh, const DiffusionTensor& tensor) {
  tensor.validate();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = mesh.area(t);
    if (!(area > 0.0)) throw AssemblyError("triangle " + std::to_string(t) + " has non-positive area");
    const auto g = hat_gradients(mesh, t);
    const auto& a = tensor.of(mesh.regions[t]);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], area * (a[0] * g[i].x * g[j].x + a[1] * g[i].y * g[j].y));
  }
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  SpMat K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Vec assemble_mass_lumped(const TriMesh& mesh, std::optional<Region> region) {
  Vec m = Vec::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (region && mesh.regions[t] != *region) continue;
    const double w = mesh.area(t) / 3.0;
    for (int v : mesh.triangles[t]) m[v] += w;
  }
  return m;
}

Vec assemble_load(const TriMesh& mesh, const std::function<double(Vec2)>& f, std::array<double, 2> region_weight) {
  Vec b = Vec::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double w = region_weight[static_cast<int>(mesh.regions[t])] * mesh.area(t) / 3.0;
    if (w == 0.0) continue;
    const auto q = midedge_points(mesh, t);
    const double f0 = f(q[0]);
    const double f1 = f(q[1]);
    const double f2 = f(q[2]);
    const auto& tri = mesh.triangles[t];
    // Midpoint k sits on edge (k, k+1): the hats of both endpoints equal 1/2 there.
    b[tri[0]] += w * 0.5 * (f0 + f2);
    b[tri[1]] += w * 0.5 * (f0 + f1);
    b[tri[2]] += w * 0.5 * (f1 + f2);
  }
  return b;
}

Vec assemble_source(const TriMesh& mesh, const SourceFn& source) {
  Vec b = Vec::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double w = mesh.area(t) / 3.0;
    const auto q = midedge_points(mesh, t);
    const auto g = hat_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      Vec2 G;
      source(t, q[k], s, G);
      b[tri[k]] += w * (0.5 * s + dot(G, g[k]));
      b[tri[(k + 1) % 3]] += w * (0.5 * s + dot(G, g[(k + 1) % 3]));
      b[tri[(k + 2) % 3]] += w * dot(G, g[(k + 2) % 3]);
    }
  }
  return b;
}

Vec assemble_line_load(const TriMesh& mesh, const std::vector<Edge>& edges, const LineFn& g) {
  Vec b = Vec::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  const double s = 0.5 / std::sqrt(3.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vec2 p = mesh.vertices[edges[e][0]];
    const Vec2 q = mesh.vertices[edges[e][1]];
    const double len = norm(q - p);
    for (double lam : {0.5 - s, 0.5 + s}) {
      const double v = 0.5 * len * g(p + (q - p) * lam, e);
      b[edges[e][0]] += v * (1.0 - lam);
      b[edges[e][1]] += v * lam;
    }
  }
  return b;
}

}  // namespace phom
