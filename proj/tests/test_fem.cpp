#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "phom/fem.hpp"

using namespace phom;

namespace {

TriMesh reference_triangle() {
  TriMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Plus};
  return m;
}

std::shared_ptr<const TriMesh> unit_square(double h) {
  return std::make_shared<const TriMesh>(build_cell_mesh(HoleSpec::none(), h).mesh);
}

ConstraintSet square_dirichlet(const TriMesh& m, const std::function<double(Vec2)>& g) {
  ConstraintSet c;
  for (const char* tag : {"side_left", "side_right", "side_bottom", "side_top"}) c.add_dirichlet(m, tag, g);
  return c;
}

}  // namespace

TEST_CASE("element stiffness on the reference triangle") {
  const TriMesh m = reference_triangle();
  const SpMat K = assemble_stiffness(m, DiffusionTensor::regionwise(1, 1, 2, 3));
  // Hats 1-x-y, x, y have gradients (-1,-1), (1,0), (0,1); area 1/2.
  const Vec2 g[3] = {{-1, -1}, {1, 0}, {0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(K.coeff(i, j) == doctest::Approx(0.5 * (2 * g[i].x * g[j].x + 3 * g[i].y * g[j].y)));
  CHECK(K.coeff(0, 0) == doctest::Approx(2.5));
  CHECK(K.coeff(0, 2) == doctest::Approx(-1.5));
}

TEST_CASE("stiffness is symmetric with constants in the kernel") {
  const auto cm = build_cell_mesh(HoleSpec::disk(0.25, 32), 0.125);
  const SpMat K = assemble_stiffness(cm.mesh, DiffusionTensor::regionwise(1, 1, 2, 0.5));
  const SpMat Kt = K.transpose();
  CHECK((K - Kt).norm() == 0.0);
  const Vec ones = Vec::Ones(K.rows());
  CHECK((K * ones).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate triangle is rejected") {
  TriMesh m;
  m.vertices = {{0, 0}, {1, 0}, {2, 0}};
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Plus};
  CHECK_THROWS_AS(assemble_stiffness(m, {}), AssemblyError);
}

TEST_CASE("load vectors") {
  const auto m = unit_square(0.125);
  CHECK(assemble_load(*m, [](Vec2) { return 0.0; }).norm() == 0.0);
  CHECK(assemble_load(*m, [](Vec2) { return 1.0; }).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(assemble_load(*m, [](Vec2 p) { return p.x; }).sum() == doctest::Approx(0.5).epsilon(1e-12));
  // Quadratic integrands are integrated exactly: int x^2 y = 1/6.
  CHECK(assemble_load(*m, [](Vec2 p) { return p.x * p.y; }).sum() == doctest::Approx(0.25).epsilon(1e-12));
  // Region weights.
  const auto s = build_strip_mesh(3, 3, HoleSpec::none(), InterfaceCurve::flat_curve(), 0.25);
  CHECK(assemble_load(s.mesh, [](Vec2) { return 1.0; }, {2.0, 0.5}).sum() == doctest::Approx(7.5));
}

TEST_CASE("line loads on the macro interface") {
  const auto mm = build_macro_mesh(1.0, 1.0, 1.0 / 64);
  const auto& Z = mm.mesh.edges("interface");
  CHECK(assemble_line_load(mm.mesh, Z, [](Vec2, std::size_t) { return 0.0; }).norm() == 0.0);
  CHECK(assemble_line_load(mm.mesh, Z, [](Vec2, std::size_t) { return 1.0; }).sum() ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double s =
      assemble_line_load(mm.mesh, Z, [](Vec2 p, std::size_t) { return std::sin(std::numbers::pi * p.y); }).sum();
  CHECK(std::abs(s - 2.0 / std::numbers::pi) < 1e-6);
}

TEST_CASE("divergence-form source equals the line integral of the normal") {
  // int grad phi . e1 over the cell equals minus the hole boundary flux of e1 against phi.
  const auto cm = build_cell_mesh(HoleSpec::disk(0.25, 32), 0.125);
  const Vec b = assemble_source(cm.mesh, [](std::size_t, Vec2, double& s, Vec2& G) {
    s = 0.0;
    G = {1.0, 0.0};
  });
  CHECK(std::abs(b.sum()) < 1e-13);
}

TEST_CASE("constrained solves") {
  const auto m = unit_square(0.125);
  const SpMat K = assemble_stiffness(*m, {});
  SUBCASE("zero data gives zero") {
    const Vec u = solve_constrained(*m, K, Vec::Zero(K.rows()), square_dirichlet(*m, [](Vec2) { return 0.0; }));
    CHECK(u.norm() == 0.0);
  }
  SUBCASE("one-dimensional quadratic is nodally accurate") {
    const double a11 = 2.0;
    const SpMat Ka = assemble_stiffness(*m, DiffusionTensor::regionwise(a11, 1, a11, 1));
    const Vec f = assemble_load(*m, [=](Vec2) { return 2.0 * a11; });  // -div(A grad u) for u = x(1-x)
    auto exact = [](Vec2 p) { return p.x * (1.0 - p.x); };
    const Vec u = solve_constrained(*m, Ka, f, square_dirichlet(*m, exact));
    double err = 0.0;
    for (std::size_t v = 0; v < m->vertices.size(); ++v) err = std::max(err, std::abs(u[v] - exact(m->vertices[v])));
    CHECK(err < 0.125 * 0.125);
  }
  SUBCASE("pure Neumann with the zero-mean gauge") {
    const auto cm = build_cell_mesh(HoleSpec::disk(0.25, 32), 0.125);
    const auto mesh = std::make_shared<const TriMesh>(cm.mesh);
    const SpMat Kc = assemble_stiffness(*mesh, {});
    const Vec f = assemble_load(*mesh, [](Vec2 p) { return std::cos(2 * std::numbers::pi * p.x); });
    ConstraintSet c;
    c.periodic = {cm.px, cm.py};
    c.zero_mean = true;
    const Vec f0 = f.array() - f.sum() / mesh->vertices.size();
    SolveStats st;
    const Vec u = solve_constrained(*mesh, Kc, f0, c, {}, &st);
    CHECK(st.gauge);
    CHECK(st.residual < 1e-10);
    CHECK(std::abs(FemFunction(mesh, u).integral()) < 1e-10);
    SolveOptions cg;
    cg.kind = SolverKind::CG;
    const Vec u2 = solve_constrained(*mesh, Kc, f0, c, cg, &st);
    CHECK(st.used == SolverKind::CG);
    CHECK((u - u2).cwiseAbs().maxCoeff() < 1e-8 * u.cwiseAbs().maxCoeff());
    SolveOptions lu;
    lu.kind = SolverKind::SparseDirect;
    CHECK((u - solve_constrained(*mesh, Kc, f0, c, lu)).cwiseAbs().maxCoeff() < 1e-10 * u.cwiseAbs().maxCoeff());
    for (const auto& [a, b] : cm.px.pairs) CHECK(u[a] == u[b]);
  }
  SUBCASE("solver kinds agree") {
    const Vec f = assemble_load(*m, [](Vec2 p) { return std::exp(p.x) * p.y; });
    const auto c = square_dirichlet(*m, [](Vec2 p) { return p.x; });
    SolveOptions o;
    o.kind = SolverKind::Dense;
    const Vec a = solve_constrained(*m, K, f, c, o);
    o.kind = SolverKind::SparseDirect;
    const Vec b = solve_constrained(*m, K, f, c, o);
    o.kind = SolverKind::CG;
    const Vec d = solve_constrained(*m, K, f, c, o);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a - d).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("constraint resolution") {
  ConstraintSet c;
  c.jumps = {{0, 1, 0.5}, {1, 2, 0.25}};
  c.dirichlet = {{2, 1.0}};
  const DofMap map = resolve_constraints(4, c);
  CHECK(map.ndof == 1);
  CHECK(map.dof[0] == -1);
  CHECK(map.offset[0] == doctest::Approx(0.25));
  CHECK(map.offset[1] == doctest::Approx(0.75));
  ConstraintSet bad;
  bad.jumps = {{0, 1, 0.5}, {1, 0, 0.5}};
  CHECK_THROWS_AS(resolve_constraints(2, bad), InvariantError);
  ConstraintSet clash;
  clash.dirichlet = {{0, 1.0}, {0, 2.0}};
  CHECK_THROWS_AS(resolve_constraints(1, clash), InvariantError);
  ConstraintSet agree;
  agree.dirichlet = {{0, 1.0}, {0, 1.0}};
  CHECK_NOTHROW(resolve_constraints(1, agree));
}

TEST_CASE("jumps across a duplicated interface are realized exactly") {
  const auto s = build_strip_mesh(3, 3, HoleSpec::none(), InterfaceCurve::flat_curve(), 0.25);
  const SpMat K = assemble_stiffness(s.mesh, {});
  ConstraintSet c;
  c.periodic = {s.py};
  c.zero_mean = true;
  for (const auto& [a, b] : s.interface.pairs) c.jumps.push_back({a, b, std::sin(2 * std::numbers::pi * s.mesh.vertices[a].y)});
  const Vec u = solve_constrained(s.mesh, K, Vec::Zero(K.rows()), c);
  for (const auto& [a, b] : s.interface.pairs)
    CHECK(std::abs(u[b] - u[a] - std::sin(2 * std::numbers::pi * s.mesh.vertices[a].y)) < 1e-10);
}

TEST_CASE("manufactured solution converges at the expected rates") {
  const double pi = std::numbers::pi;
  auto exact = [pi](Vec2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  double l2_prev = 0.0;
  double h1_prev = 0.0;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const auto m = unit_square(h);
    const Vec f = assemble_load(*m, [&](Vec2 p) { return 2 * pi * pi * exact(p); });
    const Vec u = solve_constrained(*m, assemble_stiffness(*m, {}), f, square_dirichlet(*m, exact));
    const FemFunction uh(m, u);
    const auto n = error_norms(uh, [&](std::size_t, Vec2 p) {
      return ValGrad{exact(p), {pi * std::cos(pi * p.x) * std::sin(pi * p.y), pi * std::sin(pi * p.x) * std::cos(pi * p.y)}};
    });
    if (l2_prev > 0.0) {
      CHECK(std::log2(l2_prev / n.l2) >= 1.9);
      CHECK(std::log2(h1_prev / n.h1_semi) >= 0.9);
    }
    l2_prev = n.l2;
    h1_prev = n.h1_semi;
  }
}

TEST_CASE("evaluation") {
  const auto cm = build_cell_mesh(HoleSpec::disk(0.25, 32), 0.125);
  const auto mesh = std::make_shared<const TriMesh>(cm.mesh);
  Vec vals(mesh->vertices.size());
  for (std::size_t v = 0; v < mesh->vertices.size(); ++v) vals[v] = 3.0 * mesh->vertices[v].x - 2.0 * mesh->vertices[v].y + 1.0;
  const FemFunction f(mesh, vals);
  for (std::size_t v = 0; v < mesh->vertices.size(); v += 7) CHECK(f.evaluate(mesh->vertices[v]).value == doctest::Approx(vals[v]).epsilon(1e-13));
  const ValGrad g = f.evaluate({0.1, 0.8});
  CHECK(g.value == doctest::Approx(3 * 0.1 - 1.6 + 1));
  CHECK(g.grad.x == doctest::Approx(3.0));
  CHECK(g.grad.y == doctest::Approx(-2.0));
  CHECK_THROWS_AS(f.evaluate({0.5, 0.5}), EvaluationError);  // hole centre
  // Periodic wrap of a periodic field.
  Vec per(mesh->vertices.size());
  for (std::size_t v = 0; v < mesh->vertices.size(); ++v) per[v] = std::cos(2 * std::numbers::pi * mesh->vertices[v].x);
  const FemFunction p(mesh, per, {1.0, 1.0});
  CHECK(std::abs(p.evaluate({0.13, 0.07}).value - p.evaluate({1.13, 0.07}).value) < 1e-12);
  CHECK(std::abs(p.evaluate({0.13, 0.07}).value - p.evaluate({-0.87, -2.93}).value) < 1e-12);
}

TEST_CASE("error norms") {
  const auto m = unit_square(0.125);
  Vec x(m->vertices.size());
  for (std::size_t v = 0; v < m->vertices.size(); ++v) x[v] = m->vertices[v].x;
  const FemFunction fx(m, x);
  const auto self = error_norms(fx, [&](std::size_t t, Vec2 p) { return fx.evaluate_in(t, p); });
  CHECK(self.h1 < 1e-13);
  const FemFunction zero(m, Vec::Zero(m->vertices.size()));
  CHECK(error_norms(zero, [](std::size_t, Vec2) { return ValGrad{1.0, {}}; }).l2 == doctest::Approx(1.0));
  const auto n = error_norms(zero, [](std::size_t, Vec2 p) { return ValGrad{p.x, {1.0, 0.0}}; });
  CHECK(n.h1_semi == doctest::Approx(1.0));
  CHECK(n.l2 == doctest::Approx(std::sqrt(1.0 / 3.0)));
  // Region split adds up in squares.
  const auto s = build_strip_mesh(3, 3, HoleSpec::none(), InterfaceCurve::flat_curve(), 0.25);
  const FemFunction zs(std::make_shared<const TriMesh>(s.mesh), Vec::Zero(s.mesh.vertices.size()));
  const auto r = error_norms(zs, [](std::size_t, Vec2 p) { return ValGrad{p.x * p.y, {p.y, p.x}}; });
  CHECK(r.h1 * r.h1 == doctest::Approx(r.h1_minus * r.h1_minus + r.h1_plus * r.h1_plus).epsilon(1e-12));
}

TEST_CASE("field dump") {
  const auto m = unit_square(0.25);
  const FemFunction f(m, Vec::Ones(m->vertices.size()));
  std::ostringstream os;
  write_field(os, f);
  CHECK(os.str().rfind("PH-FIELD 1\nmesh ", 0) == 0);
  std::ostringstream csv;
  write_samples_csv(csv, f, {0, 0}, {1, 1}, 3, 3);
  CHECK(csv.str().find("0.5,0.5,1") != std::string::npos);
}
