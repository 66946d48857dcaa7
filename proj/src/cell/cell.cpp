#include "phom/cell.hpp"

#include <algorithm>
#include <cmath>

namespace phom {

const FemFunction& CellSolution::N(int i, int j) const {
  if (i == 1) return j == 1 ? N11 : N12;
  return j == 1 ? N21 : N22;
}

std::shared_ptr<const CellMesh> make_cell(const HoleSpec& hole, double h) {
  return std::make_shared<const CellMesh>(build_cell_mesh(hole, h));
}

namespace {

ConstraintSet periodic_gauge(const CellMesh& cell) {
  ConstraintSet c;
  c.periodic = {cell.px, cell.py};
  c.zero_mean = true;
  return c;
}

std::shared_ptr<const TriMesh> mesh_of(const std::shared_ptr<const CellMesh>& cell) {
  return std::shared_ptr<const TriMesh>(cell, &cell->mesh);
}

// Cell average of d_a N.
double mean_derivative(const FemFunction& N, int a) {
  const TriMesh& m = N.mesh();
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) s += m.area(t) * N.gradient(t)[a - 1];
  return s / m.total_area();
}

// b_k = -int d_i phi_k, summed from the rotated opposite edges (|T| grad phi_k
// = rot(e_k) / 2) so that a hole-free periodic mesh gives an exactly zero load.
Vec constant_divergence_load(const TriMesh& m, int i) {
  Vec b = Vec::Zero(static_cast<Eigen::Index>(m.vertices.size()));
  for (const auto& tri : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const Vec2 p = m.vertices[tri[(k + 1) % 3]];
      const Vec2 q = m.vertices[tri[(k + 2) % 3]];
      b[tri[k]] -= 0.5 * (i == 0 ? (p.y - q.y) : (q.x - p.x));
    }
  return b;
}

}  // namespace

std::pair<FemFunction, FemFunction> solve_first_order(std::shared_ptr<const CellMesh> cell,
                                                      const SolveOptions& opts) {
  const auto mesh = mesh_of(cell);
  const SpMat K = assemble_stiffness(*mesh, {});
  const ConstraintSet c = periodic_gauge(*cell);
  Vec sol[2];
  for (int i = 0; i < 2; ++i) {
    const Vec b = constant_divergence_load(*mesh, i);
    sol[i] = solve_constrained(*mesh, K, b, c, opts);
  }
  FemFunction N1(mesh, sol[0], {1.0, 1.0});
  FemFunction N2(N1, sol[1]);
  return {std::move(N1), std::move(N2)};
}

EffectiveCoeffs effective_coeffs(const FemFunction& N1, const FemFunction& N2) {
  const TriMesh& m = N1.mesh();
  EffectiveCoeffs e;
  e.Ymeas = m.total_area();
  e.h11 = 1.0 + mean_derivative(N1, 1);
  e.h22 = 1.0 + mean_derivative(N2, 2);
  e.h12 = mean_derivative(N2, 1);
  e.h21 = mean_derivative(N1, 2);
  double en1 = 0.0;
  double en2 = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const Vec2 g1 = N1.gradient(t) + Vec2{1.0, 0.0};
    const Vec2 g2 = N2.gradient(t) + Vec2{0.0, 1.0};
    en1 += m.area(t) * dot(g1, g1);
    en2 += m.area(t) * dot(g2, g2);
  }
  e.h11_energy = en1 / e.Ymeas;
  e.h22_energy = en2 / e.Ymeas;
  return e;
}

FemFunction solve_second_order(const FemFunction& N1, const FemFunction& N2, int a, int b, double h_ab,
                               std::shared_ptr<const CellMesh> cell, const SolveOptions& opts) {
  const auto mesh = mesh_of(cell);
  const FemFunction& Nb = b == 1 ? N1 : N2;
  const double delta = a == b ? 1.0 : 0.0;
  // Delta N_ab = h_ab - delta_ab - 2 d_a N_b, hole flux -nu_a N_b, in
  // divergence form: int grad N_ab . grad phi = int (d_a N_b + delta - h) phi - int N_b d_a phi.
  const Vec rhs = assemble_source(*mesh, [&](std::size_t t, Vec2 x, double& s, Vec2& G) {
    s = Nb.gradient(t)[a - 1] + delta - h_ab;
    const double v = Nb.evaluate_in(t, x).value;
    G = a == 1 ? Vec2{-v, 0.0} : Vec2{0.0, -v};
  });
  const double scale = std::max(1.0, rhs.cwiseAbs().sum());
  if (std::abs(rhs.sum()) > 1e-8 * scale)
    throw ModelError("second-order cell source is incompatible (residual " + std::to_string(rhs.sum()) +
                     "); check the h constant");
  return FemFunction(N1, solve_constrained(*mesh, assemble_stiffness(*mesh, {}), rhs, periodic_gauge(*cell), opts));
}

CellSolution solve_cell(const HoleSpec& hole, const CellOptions& opts) {
  CellSolution cs;
  cs.cell = make_cell(hole, opts.h);
  auto [N1, N2] = solve_first_order(cs.cell, opts.solver);
  const EffectiveCoeffs e = effective_coeffs(N1, N2);
  cs.Ymeas = e.Ymeas;
  cs.h11 = e.h11;
  cs.h22 = e.h22;
  cs.h12 = e.h12;
  cs.h21 = e.h21;
  cs.h11_energy = e.h11_energy;
  cs.h22_energy = e.h22_energy;
  cs.h_constants = {{"11", e.h11}, {"12", e.h12}, {"21", e.h21}, {"22", e.h22}};
  cs.N11 = solve_second_order(N1, N2, 1, 1, e.h11, cs.cell, opts.solver);
  cs.N12 = solve_second_order(N1, N2, 1, 2, e.h12, cs.cell, opts.solver);
  cs.N21 = solve_second_order(N1, N2, 2, 1, e.h21, cs.cell, opts.solver);
  cs.N22 = solve_second_order(N1, N2, 2, 2, e.h22, cs.cell, opts.solver);
  cs.N1 = std::move(N1);
  cs.N2 = std::move(N2);
  return cs;
}

namespace {

double parity_residual(const FemFunction& f, const std::vector<int>& map, double sign) {
  double r = 0.0;
  const Vec& v = f.values();
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0) throw InvariantError("cell mesh is not mirror symmetric");
    r = std::max(r, std::abs(v[map[i]] - sign * v[i]));
  }
  return r;
}

}  // namespace

std::map<std::string, double> check_symmetries(const CellSolution& cs) {
  const TriMesh& m = cs.cell->mesh;
  const auto s1 = mirror_map(m, 0, 0.5);
  const auto s2 = mirror_map(m, 1, 0.5);
  std::map<std::string, double> out;
  // N_alpha(S_l xi) = (-1)^(number of indices equal to l) N_alpha(xi).
  auto add = [&](const std::string& name, const FemFunction& f, int n1, int n2) {
    out[name + "_S1"] = parity_residual(f, s1, n1 % 2 ? -1.0 : 1.0);
    out[name + "_S2"] = parity_residual(f, s2, n2 % 2 ? -1.0 : 1.0);
  };
  add("N1", cs.N1, 1, 0);
  add("N2", cs.N2, 0, 1);
  add("N11", cs.N11, 2, 0);
  add("N12", cs.N12, 1, 1);
  add("N21", cs.N21, 1, 1);
  add("N22", cs.N22, 0, 2);
  out["h12"] = std::abs(cs.h12);
  out["h21"] = std::abs(cs.h21);
  return out;
}

}  // namespace phom
