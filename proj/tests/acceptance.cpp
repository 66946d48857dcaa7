// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "phom/study.hpp"

using namespace phom;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void info(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    detail += (detail.empty() ? "" : "; ") + std::string(buf);
  }
};

int failures = 0;

void report(int id, const char* title, const std::function<void(Outcome&)>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s: %s (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", title, s, o.detail.c_str());
  std::fflush(stdout);
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

MacroModel model_from(const CellSolution& cs, double q1, double J11, double J22) {
  MacroModel m;
  m.Ymeas = cs.Ymeas;
  m.h11 = cs.h11;
  m.h22 = cs.h22;
  m.q1 = q1;
  m.J11 = J11;
  m.J22 = J22;
  return m;
}

const HoleSpec disk = HoleSpec::disk(0.25, 32);

// Studies shared by criteria 6 to 9.
StudyReport& flat_study() {
  static StudyReport r = run_study(StudyConfig{});
  return r;
}

StudyReport& osc_study() {
  static StudyReport r = [] {
    StudyConfig c;
    c.variant = MacroVariant::Osc;
    c.D_minus = 2.0;
    return run_study(c);
  }();
  return r;
}

void degeneracy(Outcome& o) {
  const auto t0 = Clock::now();
  const HoleSpec none = HoleSpec::none();
  const CellSolution cs = solve_cell(none);
  o.require(cs.N1.max_abs() == 0.0 && cs.N2.max_abs() == 0.0, "N1 = N2 = 0");
  o.require(std::abs(cs.h11 - 1.0) <= 1e-12 && std::abs(cs.h22 - 1.0) <= 1e-12, "h11 = h22 = 1");
  o.require(std::abs(cs.Ymeas - 1.0) <= 1e-12, "|Y| = 1");
  LayerOptions lo;
  const LayerPair p = compute_B1_B2_flat(cs, make_strip(none, InterfaceCurve::flat_curve(), lo), lo);
  o.require(p.B1.max_abs() == 0.0 && p.B2.max_abs() == 0.0, "B1 = B2 = 0");
  const HigherConstants hc = compute_J11_J22(cs, p.B2);
  o.require(p.B1.q == 0.0 && hc.J11 == 0.0 && hc.J22 == 0.0, "q1 = J11 = J22 = 0");

  MacroModel m = model_from(cs, p.B1.q, hc.J11, hc.J22);
  const MacroSolution v0 = solve_v0(m, make_macro_mesh(m, 1.0 / 128), MacroVariant::Flat);
  const V1Solution v1 = solve_v1_flat(m, v0, make_macro_mesh(m, 1.0 / 128, true));
  o.require(v1.v1.max_abs() == 0.0, "v1 = 0");

  double diff = 0.0, err_gap = 0.0;
  for (int N : {8, 16}) {
    const double eps = 1.0 / N;
    CompositeField A(CompositeKind::A1, m, v0, eps);
    A.with_v1(v1).with_cell(cs).with_layers(p, CutOff{0.25});
    const CompositeField V(CompositeKind::V0, m, v0, eps);
    for (int i = 0; i < 40; ++i)
      for (int j = 1; j < 20; ++j) {
        const Vec2 x{-0.975 + 0.05 * i, 0.05 * j};
        const Region side = x.x < 0.0 ? Region::Minus : Region::Plus;
        const ValGrad a = A.evaluate(x, side), b = V.evaluate(x, side);
        diff = std::max({diff, std::abs(a.value - b.value), std::abs(a.grad.x - b.grad.x),
                         std::abs(a.grad.y - b.grad.y)});
      }
    auto em = std::make_shared<const EpsMesh>(build_eps_mesh(N, 1.0, 1.0, none, InterfaceCurve::flat_curve(), eps / 8));
    const FineSolution u = solve_fine_flat(em, m.source);
    err_gap = std::max(err_gap, std::abs(error_report(u.u, A).h1 - error_report(u.u, V).h1));
  }
  o.require(diff == 0.0, "A1 = v0 pointwise");
  o.require(err_gap == 0.0, "|u - A1| = |u - v0| on the fine meshes");
  const double s = seconds(t0);
  o.require(s < 10.0, "runtime < 10 s");
  o.info("max |A1 - v0| = %.1e, H1 error gap %.1e", diff, err_gap);
}

void j1_identity(Outcome& o) {
  const auto t0 = Clock::now();
  for (double h : {1.0 / 8, 1.0 / 16}) {
    const CellSolution cs = solve_cell(disk, {h, {}});
    LayerOptions lo;
    lo.h = h;
    const double J1 = interface_flux_J1(cs, *make_strip(disk, InterfaceCurve::flat_curve(), lo));
    const double Yh = cs.Ymeas * cs.h11;
    const double rel = std::abs(J1 - Yh) / Yh;
    o.require(rel <= (h > 0.1 ? 1e-2 : 2e-3), "J1 = |Y| h11 at h = " + std::to_string(h));
    o.info("h = %.4f: J1 = %.8f, rel. defect %.1e", h, J1, rel);
  }
  o.require(seconds(t0) < 120.0, "runtime < 2 min");
}

void jtilde_identity(Outcome& o) {
  const auto t0 = Clock::now();
  const CellSolution cs = solve_cell(disk);
  LayerOptions lo;
  const LayerPair p =
      compute_B1_B2_osc(cs, make_strip(disk, InterfaceCurve::oscillating(0.3), lo), 2.0, OscRoute::TotalField, lo);
  const double Yh = cs.Ymeas * cs.h11;
  const double defect = std::abs(p.B1.J - (Yh - 1.0));
  o.require(defect <= 1e-2 * Yh, "Jtilde1 = |Y| h11 - 1");
  o.require(seconds(t0) < 180.0, "runtime < 3 min");
  o.info("Jtilde1 = %.8f, |Y| h11 - 1 = %.8f, defect %.1e", p.B1.J, Yh - 1.0, defect);
}

void symmetries(Outcome& o) {
  const CellSolution cs = solve_cell(disk);
  double worst = 0.0;
  for (const auto& [name, r] : check_symmetries(cs)) {
    const bool wanted = name.rfind("N1_", 0) == 0 || name.rfind("N2_", 0) == 0 || name.rfind("N11_", 0) == 0 ||
                        name.rfind("N12_", 0) == 0;
    if (wanted) worst = std::max(worst, r);
  }
  o.require(worst <= 1e-8, "cell reflection residuals");
  LayerOptions lo;
  const LayerPair p = compute_B1_B2_flat(cs, make_strip(disk, InterfaceCurve::flat_curve(), lo), lo);
  const double even = strip_parity_residual(p.B1, 1.0), odd = strip_parity_residual(p.B2, -1.0);
  o.require(even <= 1e-8 && odd <= 1e-8, "B1 even, B2 odd");
  o.require(std::abs(p.B2.q) <= 1e-8, "q2 = 0");
  o.info("cell %.1e, B1 %.1e, B2 %.1e", worst, even, odd);
  o.info("q2 = %.1e", p.B2.q);
}

void decay(Outcome& o) {
  const CellSolution cs = solve_cell(disk);
  LayerOptions lo;
  const LayerPair p = compute_B1_B2_flat(cs, make_strip(disk, InterfaceCurve::flat_curve(), lo), lo);
  for (const auto* s : {&p.B1, &p.B2}) {
    o.require(s->decay.rate > 0.0 && s->decay.r2 >= 0.98, "decay fit");
    o.info("rate %.3f, R2 %.4f", s->decay.rate, s->decay.r2);
  }
  LayerOptions lo9 = lo;
  lo9.L_minus = lo9.L_plus = 9;
  const LayerPair p9 = compute_B1_B2_flat(cs, make_strip(disk, InterfaceCurve::flat_curve(), lo9), lo9);
  const double dq = std::abs(p.B1.q - p9.B1.q);
  o.require(dq <= 1e-4 * p.B1.max_abs(), "q1 stable in the truncation");
  o.info("|q1(6) - q1(9)| = %.1e, max|B1| = %.3e", dq, p.B1.max_abs());
}

void flat_rate(Outcome& o) {
  const auto t0 = Clock::now();
  const StudyReport& r = flat_study();
  o.require(r.approx_h1.slope >= 0.85 && r.approx_h1.slope <= 1.3 && r.approx_h1.r2 >= 0.95, "H1 rate of u - A1");
  o.require(r.v0_l2.slope >= 0.85, "L2 rate of u - v0");
  o.require(r.all_invariants_pass(), "pipeline invariants");
  o.require(seconds(t0) < 900.0, "runtime < 15 min");
  o.info("H1(u - A1) slope %.3f R2 %.5f", r.approx_h1.slope, r.approx_h1.r2);
  o.info("L2(u - v0) slope %.3f", r.v0_l2.slope);
}

void interior(Outcome& o) {
  const StudyReport& r = flat_study();
  o.require(r.v0_interior_h1_minus.slope >= 0.85, "interior H1 rate on the minus side");
  o.info("slope %.3f R2 %.5f", r.v0_interior_h1_minus.slope, r.v0_interior_h1_minus.r2);
}

void osc_rate(Outcome& o) {
  const StudyReport& r = osc_study();
  o.require(r.approx_h1.slope >= 0.4 && r.approx_h1.slope <= 1.1 && r.approx_h1.r2 >= 0.9, "H1 rate of u - U");
  o.require(r.all_invariants_pass(), "pipeline invariants");
  o.info("H1(u - U) slope %.3f R2 %.5f", r.approx_h1.slope, r.approx_h1.r2);
}

void microstructure(Outcome& o) {
  const double a = 0.3, pi = std::numbers::pi;
  auto w = [pi](double x2) { return std::pow(std::sin(pi * x2), 2); };
  auto theta = [&](double x2, double t) { return w(x2) * (1.0 + 0.5 * std::cos(2 * pi * t)); };
  const Spline1D hat = theta_hat(theta, InterfaceCurve::oscillating(a), 1.0);
  double qdiff = 0.0;
  for (std::size_t j = 0; j < hat.values().size(); ++j) {
    const double x2 = hat.x0() + hat.step() * j;
    auto integrand = [&](double t) {
      const double dl = -a * pi * std::sin(2 * pi * t);
      return theta(x2, t) * std::sqrt(1.0 + dl * dl);
    };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 10, 1e-13);
    qdiff = std::max(qdiff, std::abs(hat.values()[j] - ref));
  }
  o.require(qdiff <= 1e-10, "theta_hat vs adaptive quadrature");
  o.info("theta_hat quadrature defect %.1e", qdiff);

  StudyConfig c;
  c.variant = MacroVariant::OscTheta;
  c.D_minus = 2.0;
  c.amplitude = a;
  c.theta_base = 1.0;
  c.theta_modulation = 0.5;
  const StudyReport r = run_study(c);
  bool monotone = true, above = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (i > 0) monotone = monotone && r.rows[i].approx.l2 < r.rows[i - 1].approx.l2;
    above = above && r.rows[i].v0.l2 > r.rows[i].approx.l2;
  }
  o.require(monotone, "L2 distance to the theta_hat model decreases");
  o.require(above, "variant without arclength stays above");
  o.info("theta_hat L2 %.2e -> %.2e", r.rows.front().approx.l2, r.rows.back().approx.l2);
  o.info("without arclength %.2e -> %.2e", r.rows.front().v0.l2, r.rows.back().v0.l2);
}

void fem_core(Outcome& o) {
  // u = sin(pi (x1 + 1) / 2) sin(pi x2) on the macro rectangle (-1, 1) x (0, 1).
  const double pi = std::numbers::pi;
  auto exact = [pi](Vec2 p) { return std::sin(0.5 * pi * (p.x + 1)) * std::sin(pi * p.y); };
  auto grad = [pi](Vec2 p) {
    return Vec2{0.5 * pi * std::cos(0.5 * pi * (p.x + 1)) * std::sin(pi * p.y),
                pi * std::sin(0.5 * pi * (p.x + 1)) * std::cos(pi * p.y)};
  };
  std::vector<double> hs, l2, h1;
  double energy_defect = 0.0;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto mm = std::make_shared<const MacroMesh>(build_macro_mesh(1.0, 1.0, h));
    const TriMesh& tm = mm->mesh;
    const SpMat K = assemble_stiffness(tm, {});
    const Vec f = assemble_load(tm, [&](Vec2 p) { return 1.25 * pi * pi * exact(p); });
    ConstraintSet cs;
    cs.add_dirichlet(tm, "dirichlet", 0.0);
    const Vec u = solve_constrained(tm, K, f, cs);
    const double au = u.dot(K * u), lu = u.dot(f);
    energy_defect = std::max(energy_defect, std::abs(au - lu) / au);
    const FemFunction uh(std::shared_ptr<const TriMesh>(mm, &mm->mesh), u);
    const ErrorNorms n = error_norms(uh, [&](std::size_t, Vec2 p) { return ValGrad{exact(p), grad(p)}; });
    hs.push_back(h);
    l2.push_back(n.l2);
    h1.push_back(n.h1_semi);
  }
  const RateFit rl2 = fit_rate(hs, l2), rh1 = fit_rate(hs, h1);
  o.require(rl2.slope >= 1.9 && rh1.slope >= 0.9, "manufactured solution rates");
  o.info("L2 slope %.3f, H1 slope %.3f", rl2.slope, rh1.slope);

  // Galerkin energy identities of the cell and fine solves.
  const CellSolution cell = solve_cell(disk);
  const double cell_defect = std::max(std::abs(cell.h11_energy - cell.h11) / cell.h11,
                                      std::abs(cell.h22_energy - cell.h22) / cell.h22);
  energy_defect = std::max(energy_defect, cell_defect);
  for (const auto* r : {&flat_study(), &osc_study()})
    for (const auto& row : r->rows) energy_defect = std::max(energy_defect, row.energy_residual);
  o.require(energy_defect <= 1e-9, "energy identities");
  o.info("max relative energy defect %.1e", energy_defect);
}

}  // namespace

int main() {
  report(1, "degeneracy chain", degeneracy);
  report(2, "J1 = |Y| h11", j1_identity);
  report(3, "Jtilde1 = |Y| h11 - 1", jtilde_identity);
  report(4, "symmetry suite", symmetries);
  report(5, "layer decay and truncation", decay);
  report(6, "flat interface rate", flat_rate);
  report(7, "interior estimate", interior);
  report(8, "oscillating interface rate", osc_rate);
  report(9, "interface microstructure", microstructure);
  report(10, "FEM core", fem_core);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
