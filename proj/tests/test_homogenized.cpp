#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phom/homogenized.hpp"

using namespace phom;

namespace {

MacroModel disk_model() {
  MacroModel m;
  m.Ymeas = 0.80491;
  m.h11 = 0.83662;
  m.h22 = 0.83662;
  return m;
}

double sup_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("source bumps") {
  const SourceSpec spec;
  const SourceFields f = source_fields(spec);
  CHECK(f.plus(spec.center_plus) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(f.minus(spec.center_minus) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(f.plus({0.5, 0.5 + 0.3}) == 0.0);
  CHECK(f.plus({0.15, 0.5}) == 0.0);
  CHECK(f.minus({0.0, 0.5}) == 0.0);
  // Support of f+ is the disk of radius 0.3 around (0.5, 0.5): 0.2 from the boundary of (0,1)^2.
  const double clearance = std::min({spec.center_plus.x - spec.rho, 1.0 - spec.center_plus.x - spec.rho,
                                     spec.center_plus.y - spec.rho, 1.0 - spec.center_plus.y - spec.rho});
  CHECK(clearance >= 0.2 - 1e-15);

  // Radial oracle: int f+ = 2 pi rho^2 int_0^1 r exp(-1/(1-r^2)) dr.
  const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double r) { return r * std::exp(-1.0 / (1.0 - r * r)); }, 0.0, 1.0, 15, 1e-14);
  const double oracle = 2.0 * std::numbers::pi * spec.rho * spec.rho * radial;
  MacroModel m;
  const auto mesh = make_macro_mesh(m, 1.0 / 256);
  const Vec load = assemble_load(mesh->mesh, f.plus);
  CHECK(load.sum() == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("zero sources give v0 = 0") {
  MacroModel m = disk_model();
  m.source.c = 0.0;
  const auto mesh = make_macro_mesh(m, 1.0 / 16);
  const MacroSolution s = solve_v0(m, mesh, MacroVariant::Flat);
  CHECK(s.v0.max_abs() == 0.0);
}

TEST_CASE("no-hole homogenized problem is the plain Poisson problem") {
  MacroModel m;
  const auto mesh = make_macro_mesh(m, 1.0 / 32);
  const MacroSolution s = solve_v0(m, mesh, MacroVariant::Flat);
  const SourceFields f = source_fields(m.source);
  const TriMesh& tm = mesh->mesh;
  const Vec rhs = -assemble_load(tm, [&](Vec2 x) { return f.minus(x) + f.plus(x); });
  ConstraintSet c;
  c.add_dirichlet(tm, "dirichlet", 0.0);
  const Vec plain = solve_constrained(tm, assemble_stiffness(tm, DiffusionTensor::identity()), rhs, c);
  CHECK(sup_norm(plain - s.v0.values()) <= 1e-12 * sup_norm(plain));
  CHECK(s.v0.max_abs() > 0.0);
}

TEST_CASE("oscillating variant with unit D- has the flat system matrix") {
  MacroModel m = disk_model();
  m.D_minus = 1.0;
  const auto mesh = make_macro_mesh(m, 1.0 / 16);
  const SpMat a = assemble_stiffness(mesh->mesh, m.tensor(MacroVariant::Flat));
  const SpMat b = assemble_stiffness(mesh->mesh, m.tensor(MacroVariant::Osc));
  CHECK((a - b).norm() == 0.0);
  m.D_minus = 0.0;
  CHECK_THROWS_AS(m.validate(), ModelError);
}

TEST_CASE("discrete flux balance across the interface converges") {
  const MacroModel m = disk_model();
  double defect[3];
  int k = 0;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const MacroSolution s = solve_v0(m, make_macro_mesh(m, h), MacroVariant::Flat);
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double y) {
          return (s.dx1_minus(y) - m.Ymeas * m.h11 * s.dx1_plus(y)) * std::sin(std::numbers::pi * y);
        },
        0.0, 1.0, 10, 1e-12);
    defect[k++] = std::abs(val);
  }
  MESSAGE("flux defects " << defect[0] << " " << defect[1] << " " << defect[2]);
  CHECK(std::log2(defect[0] / defect[1]) >= 1.0);
  CHECK(std::log2(defect[1] / defect[2]) >= 1.0);
}

TEST_CASE("recovered gradients reproduce a quadratic in the interior") {
  MacroModel m;
  const auto mesh = make_macro_mesh(m, 1.0 / 32);
  const TriMesh& tm = mesh->mesh;
  Vec u(tm.vertices.size());
  for (std::size_t i = 0; i < tm.vertices.size(); ++i) {
    const Vec2 x = tm.vertices[i];
    u[i] = x.x * x.x + 3.0 * x.x * x.y - 0.5 * x.y * x.y;
  }
  const RecoveredField r(FemFunction(std::shared_ptr<const TriMesh>(mesh, &mesh->mesh), u));
  for (Vec2 x : {Vec2{0.31, 0.47}, Vec2{-0.52, 0.21}, Vec2{0.77, 0.66}}) {
    const auto s = r.evaluate(x, x.x < 0 ? Region::Minus : Region::Plus);
    CHECK(s.grad.x == doctest::Approx(2.0 * x.x + 3.0 * x.y).epsilon(1e-10));
    CHECK(s.grad.y == doctest::Approx(3.0 * x.x - x.y).epsilon(1e-10));
    CHECK(s.hess.xx == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.hess.xy == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.hess.yy == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("v1: vanishing constants give v1 = 0, otherwise the jump is realized") {
  MacroModel m = disk_model();
  const double h = 1.0 / 32;
  const MacroSolution v0 = solve_v0(m, make_macro_mesh(m, h), MacroVariant::Flat);
  const auto dup = make_macro_mesh(m, h, true);
  CHECK(solve_v1_flat(m, v0, dup).v1.max_abs() == 0.0);

  m.q1 = -0.0016;
  m.J22 = 0.0013;
  const V1Solution v1 = solve_v1_flat(m, v0, dup);
  CHECK(v1.jump_defect <= 1e-10);
  CHECK(v1.v1.max_abs() > 0.0);
  for (const auto& [a, b] : dup->split.pairs) {
    const double x2 = dup->mesh.vertices[a].y;
    if (x2 <= 0.0 || x2 >= 1.0) continue;
    CHECK(std::abs(v1.v1.values()[a] - v1.v1.values()[b] - m.q1 * v0.dx1_plus(x2)) <= 1e-10);
  }
  CHECK_THROWS_AS(solve_v1_flat(m, v0, make_macro_mesh(m, h)), ModelError);
}

TEST_CASE("theta_hat tabulation") {
  const auto flat = InterfaceCurve::flat_curve();
  const auto osc = InterfaceCurve::oscillating(0.3);
  const auto w = [](double x2) { return std::sin(std::numbers::pi * x2) * std::sin(std::numbers::pi * x2); };

  const Spline1D a = theta_hat([&](double x2, double) { return w(x2); }, flat, 1.0, 64);
  for (int j = 0; j <= 64; ++j) CHECK(a.values()[j] == doctest::Approx(w(j / 64.0)).epsilon(1e-15));

  const Spline1D b = theta_hat([](double, double) { return 1.0; }, osc, 1.0, 16);
  const double oracle = boost::math::quadrature::tanh_sinh<double>().integrate(
      [](double t) {
        const double s = 0.3 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * t);
        return std::sqrt(1.0 + s * s);
      },
      0.0, 1.0);
  for (double x2 : {0.0, 0.3, 0.77, 1.0}) CHECK(std::abs(b(x2) - oracle) <= 1e-10);

  const Spline1D c =
      theta_hat([&](double x2, double t) { return w(x2) * std::sin(2.0 * std::numbers::pi * t); }, flat, 1.0, 32);
  for (double v : c.values()) CHECK(std::abs(v) <= 1e-12);

  const Spline1D plain = theta_mean([](double, double) { return 1.0; }, 1.0, 16);
  CHECK(plain(0.4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b(0.4) > plain(0.4));
}

TEST_CASE("interface flux datum shifts the normal flux") {
  MacroModel m;
  m.source.c = 0.0;
  m.D_minus = 2.0;
  m.theta_hat = theta_mean([](double x2, double) { return std::sin(std::numbers::pi * x2); }, 1.0, 64);
  const MacroSolution s = solve_v0(m, make_macro_mesh(m, 1.0 / 64), MacroVariant::OscTheta);
  CHECK(s.v0.max_abs() > 0.0);
  for (double x2 : {0.25, 0.5, 0.8}) {
    const double jump = m.D_minus * s.dx1_minus(x2) - s.dx1_plus(x2);
    CHECK(jump == doctest::Approx(std::sin(std::numbers::pi * x2)).epsilon(2e-2));
  }
}
