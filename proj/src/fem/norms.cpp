#include <cmath>
#include <cstdio>
#include <ostream>

#include "phom/fem.hpp"
#include "phom/mesh_io.hpp"

namespace phom {

ErrorNorms error_norms(const FemFunction& u, const ReferenceFn& reference, double band) {
  const TriMesh& mesh = u.mesh();
  double l2[2] = {0.0, 0.0};
  double semi[2] = {0.0, 0.0};
  double inner[2] = {0.0, 0.0};
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const int r = static_cast<int>(mesh.regions[t]);
    const double w = mesh.area(t) / 3.0;
    const Vec2 gu = u.gradient(t);
    const auto q = midedge_points(mesh, t);
    for (const Vec2& x : q) {
      const ValGrad ref = reference(t, x);
      const double dv = u.evaluate_in(t, x).value - ref.value;
      const Vec2 dg = gu - ref.grad;
      const double e0 = w * dv * dv;
      const double e1 = w * dot(dg, dg);
      l2[r] += e0;
      semi[r] += e1;
      if (std::abs(x.x) >= band) inner[r] += e0 + e1;
    }
  }
  ErrorNorms n;
  n.l2 = std::sqrt(l2[0] + l2[1]);
  n.h1_semi = std::sqrt(semi[0] + semi[1]);
  n.h1 = std::sqrt(l2[0] + l2[1] + semi[0] + semi[1]);
  n.l2_minus = std::sqrt(l2[0]);
  n.l2_plus = std::sqrt(l2[1]);
  n.h1_minus = std::sqrt(l2[0] + semi[0]);
  n.h1_plus = std::sqrt(l2[1] + semi[1]);
  n.interior_h1 = std::sqrt(inner[0] + inner[1]);
  n.interior_h1_minus = std::sqrt(inner[0]);
  n.interior_h1_plus = std::sqrt(inner[1]);
  return n;
}

void write_field(std::ostream& os, const FemFunction& fn) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mesh_checksum(fn.mesh())));
  os << "PH-FIELD 1\n";
  os << "mesh " << buf << '\n';
  os << "values " << fn.values().size() << '\n';
  for (Eigen::Index i = 0; i < fn.values().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", fn.values()[i]);
    os << buf << '\n';
  }
}

void write_samples_csv(std::ostream& os, const FemFunction& fn, Vec2 lo, Vec2 hi, int nx, int ny,
                       std::optional<Region> side) {
  os << "x,y,value\n";
  char buf[96];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 p{lo.x + (hi.x - lo.x) * (nx > 1 ? double(i) / (nx - 1) : 0.5),
                   lo.y + (hi.y - lo.y) * (ny > 1 ? double(j) / (ny - 1) : 0.5)};
      if (fn.locate(p, side) < 0) continue;
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g\n", p.x, p.y, fn.evaluate(p, side).value);
      os << buf;
    }
}

}  // namespace phom
