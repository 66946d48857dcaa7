#include <cmath>

#include "doctest.h"
#include "phom/direct.hpp"

using namespace phom;

namespace {

std::shared_ptr<const EpsMesh> eps_mesh(int N, const HoleSpec& hole, const InterfaceCurve& curve) {
  return std::make_shared<const EpsMesh>(build_eps_mesh(N, 1.0, 1.0, hole, curve, 1.0 / (8.0 * N)));
}

double sup(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

double h1_norm(const FemFunction& u) {
  return error_norms(u, [](std::size_t, Vec2) { return ValGrad{}; }).h1;
}

}  // namespace

TEST_CASE("zero data give the zero solution") {
  const HoleSpec disk = HoleSpec::disk(0.25, 32);
  SourceSpec zero;
  zero.c = 0.0;
  CHECK(solve_fine_flat(eps_mesh(4, disk, InterfaceCurve::flat_curve()), zero).u.max_abs() == 0.0);
  CHECK(solve_fine_osc(eps_mesh(4, disk, InterfaceCurve::oscillating(0.3)), 2.0, zero).u.max_abs() == 0.0);
}

TEST_CASE("energy identity holds for the perforated solves") {
  const HoleSpec disk = HoleSpec::disk(0.25, 32);
  const FineSolution a = solve_fine_flat(eps_mesh(8, disk, InterfaceCurve::flat_curve()), {});
  CHECK(a.energy > 0.0);
  CHECK(a.energy_residual <= 1e-9);
  const FineSolution b = solve_fine_osc(eps_mesh(8, disk, InterfaceCurve::oscillating(0.3)), 2.0, {},
                                        [](double x2, double xi2) { return x2 * (1 + std::cos(6.28 * xi2)); });
  CHECK(b.energy_residual <= 1e-9);
}

TEST_CASE("unit D- on the flat mesh reproduces the flat solve") {
  const auto mesh = eps_mesh(8, HoleSpec::disk(0.25, 32), InterfaceCurve::flat_curve());
  const FineSolution a = solve_fine_flat(mesh, {});
  const FineSolution b = solve_fine_osc(mesh, 1.0, {});
  CHECK(sup(a.u.values() - b.u.values()) <= 1e-12 * a.u.max_abs());
}

TEST_CASE("the flat solver refuses an oscillating mesh") {
  CHECK_THROWS(solve_fine_flat(eps_mesh(4, HoleSpec::disk(0.25, 32), InterfaceCurve::oscillating(0.3)), {}));
}

TEST_CASE("interface flux datum enters linearly") {
  const auto mesh = eps_mesh(4, HoleSpec::disk(0.25, 32), InterfaceCurve::oscillating(0.3));
  SourceSpec zero;
  zero.c = 0.0;
  const FineSolution one = solve_fine_osc(mesh, 2.0, zero, [](double, double) { return 1.0; });
  const FineSolution three = solve_fine_osc(mesh, 2.0, zero, [](double, double) { return 3.0; });
  CHECK(one.u.max_abs() > 1e-3);
  CHECK(sup(three.u.values() - 3.0 * one.u.values()) <= 1e-12 * three.u.max_abs());
}

TEST_CASE("without holes the solution does not depend on N") {
  const HoleSpec none = HoleSpec::none();
  const FineSolution a = solve_fine_flat(eps_mesh(4, none, InterfaceCurve::flat_curve()), {});
  const FineSolution b = solve_fine_flat(eps_mesh(8, none, InterfaceCurve::flat_curve()), {});
  double diff = 0.0;
  for (int i = 1; i < 20; ++i)
    for (int j = 1; j < 10; ++j) {
      const Vec2 x{-1.0 + 0.1 * i, 0.1 * j};
      diff = std::max(diff, std::abs(a.u.evaluate(x).value - b.u.evaluate(x).value));
    }
  // Both meshes have h = 1/32 and 1/64; the P1 error is O(h^2).
  MESSAGE("cross-N difference " << diff << " of max " << a.u.max_abs());
  CHECK(diff <= 1e-2 * a.u.max_abs());
}

TEST_CASE("the H1 norm of the fine solution does not grow with N") {
  const HoleSpec disk = HoleSpec::disk(0.25, 32);
  double first = 0.0;
  for (int N : {4, 8, 16}) {
    const double n = h1_norm(solve_fine_osc(eps_mesh(N, disk, InterfaceCurve::oscillating(0.3)), 2.0, {}).u);
    if (first == 0.0) first = n;
    CHECK(n <= 1.05 * first);
  }
}
