#include "phom/direct.hpp"

#include <cmath>

namespace phom {

namespace {

FineSolution solve_fine(std::shared_ptr<const EpsMesh> mesh, double D_minus, const SourceSpec& source,
                        const FineThetaFn& theta, const SolveOptions& opts) {
  const TriMesh& tm = mesh->mesh;
  const SourceFields f = source_fields(source);
  const SpMat K = assemble_stiffness(tm, DiffusionTensor::regionwise(D_minus, D_minus, 1.0, 1.0));
  Vec rhs = -assemble_load(tm, [&](Vec2 x) { return f.minus(x) + f.plus(x); });
  if (theta) {
    const double eps = mesh->eps;
    rhs += assemble_line_load(tm, tm.edges("interface"),
                              [&](Vec2 x, std::size_t) { return theta(x.y, x.y / eps); });
  }
  ConstraintSet c;
  c.add_dirichlet(tm, "dirichlet", 0.0);

  FineSolution s;
  s.mesh = mesh;
  Vec u = solve_constrained(tm, K, rhs, c, opts, &s.stats);
  // Galerkin identity a(u, u) = l(u); Dirichlet rows carry zero values.
  s.energy = u.dot(K * u);
  const double load = rhs.dot(u);
  s.energy_residual = s.energy != 0.0 ? std::abs(s.energy - load) / std::abs(s.energy) : std::abs(load);
  s.u = FemFunction(std::shared_ptr<const TriMesh>(mesh, &mesh->mesh), std::move(u));
  return s;
}

}  // namespace

FineSolution solve_fine_flat(std::shared_ptr<const EpsMesh> mesh, const SourceSpec& source,
                             const SolveOptions& opts) {
  if (!mesh->curve.flat()) throw ModelError("the flat problem needs a flat interface mesh");
  return solve_fine(std::move(mesh), 1.0, source, {}, opts);
}

FineSolution solve_fine_osc(std::shared_ptr<const EpsMesh> mesh, double D_minus, const SourceSpec& source,
                            const FineThetaFn& theta, const SolveOptions& opts) {
  if (!(D_minus > 0.0)) throw ModelError("D_minus must be positive");
  return solve_fine(std::move(mesh), D_minus, source, theta, opts);
}

}  // namespace phom
