#include "phom/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

namespace phom {

using nlohmann::ordered_json;

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size()) throw ConfigError("rate fit needs matching eps and error lists");
  if (eps.size() < 3) throw ConfigError("rate fit needs at least three points");
  const double n = static_cast<double>(eps.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0)) throw ConfigError("rate fit needs positive eps and errors");
    sx += std::log(eps[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double dx = std::log(eps[i]) - mx, dy = std::log(err[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ConfigError("rate fit needs distinct eps values");
  RateFit f;
  f.slope = sxy / sxx;
  const double ss_res = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  const auto [lo, hi] = std::minmax_element(err.begin(), err.end());
  f.degenerate = *hi - *lo <= 1e-3 * *hi;
  f.low_fit = f.r2 < 0.99;
  return f;
}

bool StudyReport::all_invariants_pass() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& p) { return p.second; });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

RateFit fit_column(const std::vector<StudyRow>& rows, double (*pick)(const StudyRow&)) {
  std::vector<double> e, v;
  for (const auto& r : rows) {
    e.push_back(r.eps);
    v.push_back(pick(r));
  }
  return fit_rate(e, v);
}

ordered_json norms_json(const ErrorNorms& n) {
  return {{"l2", n.l2},
          {"h1", n.h1},
          {"h1_semi", n.h1_semi},
          {"l2_minus", n.l2_minus},
          {"l2_plus", n.l2_plus},
          {"h1_minus", n.h1_minus},
          {"h1_plus", n.h1_plus},
          {"interior_h1", n.interior_h1},
          {"interior_h1_minus", n.interior_h1_minus},
          {"interior_h1_plus", n.interior_h1_plus}};
}

ordered_json rate_json(const RateFit& f) {
  return {{"slope", f.slope}, {"r2", f.r2}, {"low_fit", f.low_fit}, {"degenerate", f.degenerate}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

StudyReport run_study(const StudyConfig& c, std::ostream* log) {
  c.validate();
  const auto t0 = Clock::now();
  auto say = [&](const std::string& s) {
    if (log) *log << s << std::endl;
  };

  StudyReport r;
  r.config = c;
  r.degenerate = c.hole.empty();
  auto check = [&](const std::string& name, bool ok) { r.invariants.emplace_back(name, ok); };
  auto note = [&](const std::string& name, double v) { r.diagnostics.emplace_back(name, v); };
  const bool flat = c.variant == MacroVariant::Flat;
  const InterfaceCurve curve = c.curve();

  say("cell: h = " + std::to_string(c.cell_h));
  const CellSolution cell = stage("cell", [&] { return solve_cell(c.hole, {c.cell_h, c.solver}); });
  double sym = 0.0;
  for (const auto& [name, v] : check_symmetries(cell)) sym = std::max(sym, v);
  note("cell.symmetry_residual", sym);
  check("cell.symmetry", sym <= 1e-8);
  Constants& k = r.constants;
  k.Ymeas = cell.Ymeas;
  k.h11 = cell.h11;
  k.h22 = cell.h22;

  say("layer: L = (" + std::to_string(c.L_minus) + ", " + std::to_string(c.L_plus) + ")");
  LayerOptions lo;
  lo.L_minus = c.L_minus;
  lo.L_plus = c.L_plus;
  lo.h = c.cell_h;
  lo.farfield_tol = c.farfield_tol;
  lo.solver = c.solver;
  const LayerPair flat_layers = stage("layer", [&] {
    return compute_B1_B2_flat(cell, make_strip(c.hole, InterfaceCurve::flat_curve(), lo), lo);
  });
  const HigherConstants hc = stage("layer", [&] { return compute_J11_J22(cell, flat_layers.B2); });
  k.q1 = flat_layers.B1.q;
  k.q2 = flat_layers.B2.q;
  k.J1 = flat_layers.B1.J;
  k.J11 = hc.J11;
  k.J22 = hc.J22;
  const double Yh = k.Ymeas * k.h11;
  check("layer.J1_identity", std::abs(k.J1 - Yh) <= 1e-2 * Yh);
  check("layer.q2_zero", std::abs(k.q2) <= 1e-8);
  const double par =
      std::max(strip_parity_residual(flat_layers.B1, 1.0), strip_parity_residual(flat_layers.B2, -1.0));
  note("layer.parity_residual", par);
  check("layer.parity", par <= 1e-8);
  check("layer.truncation", flat_layers.B1.truncation_ok && flat_layers.B2.truncation_ok);
  for (const auto& [name, s] : {std::pair{"B1", &flat_layers.B1}, std::pair{"B2", &flat_layers.B2}}) {
    note(std::string("layer.") + name + ".farfield", std::max(s->farfield_minus, s->farfield_plus));
    if (s->decay.identically_zero) continue;
    note(std::string("layer.") + name + ".decay_rate", s->decay.rate);
    note(std::string("layer.") + name + ".decay_r2", s->decay.r2);
    check(std::string("layer.") + name + ".decay", s->decay.rate > 0.0);
  }

  LayerPair osc_layers;
  if (!flat) {
    say("oscillating layer: a = " + std::to_string(c.amplitude));
    osc_layers = stage("layer", [&] {
      return compute_B1_B2_osc(cell, make_strip(c.hole, curve, lo), c.D_minus, OscRoute::TotalField, lo);
    });
    k.Jtilde1 = osc_layers.B1.J;
    k.q1_osc = osc_layers.B1.q;
    check("osc_layer.Jtilde1_identity", std::abs(*k.Jtilde1 - (Yh - 1.0)) <= 1e-2 * Yh);
    check("osc_layer.truncation", osc_layers.B1.truncation_ok && osc_layers.B2.truncation_ok);
  }

  say("macro: h = " + std::to_string(c.macro_h));
  MacroModel m;
  m.D_minus = c.D_minus;
  m.Ymeas = k.Ymeas;
  m.h11 = k.h11;
  m.h22 = k.h22;
  m.q1 = k.q1;
  m.J11 = k.J11;
  m.J22 = k.J22;
  m.source = c.source;
  m.d = c.d;
  m.left_extent = c.left_extent;
  MacroModel m_mean = m;
  const auto macro_mesh = stage("macro", [&] { return make_macro_mesh(m, c.macro_h); });
  const MacroVariant base_variant = flat ? MacroVariant::Flat : MacroVariant::Osc;
  const MacroSolution v0 = stage("macro", [&] { return solve_v0(m, macro_mesh, base_variant, c.solver); });
  std::optional<V1Solution> v1;
  std::optional<MacroSolution> v0_theta, v0_mean;
  if (flat) {
    v1 = stage("macro", [&] { return solve_v1_flat(m, v0, make_macro_mesh(m, c.macro_h, true), c.solver); });
    note("macro.v1_jump_defect", v1->jump_defect);
    check("macro.v1_jump", v1->jump_defect <= 1e-9);
  }
  const ThetaFn theta = c.theta();
  if (c.variant == MacroVariant::OscTheta) {
    stage("macro", [&] {
      m.theta_hat = theta_hat(theta, curve, c.d);
      m_mean.theta_hat = theta_mean(theta, c.d);
      v0_theta = solve_v0(m, macro_mesh, MacroVariant::OscTheta, c.solver);
      v0_mean = solve_v0(m_mean, macro_mesh, MacroVariant::OscTheta, c.solver);
      return 0;
    });
  }
  const double v0_max = v0.v0.max_abs();

  const double eps_min = c.d / c.N_list.back();
  r.rho0 = c.rho0 > 0.0 ? c.rho0 : admissible_rho0(0.5 * std::min(c.left_extent, c.d), eps_min, c.L_minus, c.L_plus);
  const CutOff chi{r.rho0};
  r.setup_seconds = seconds_since(t0);

  bool energy_ok = true, jump_ok = true;
  for (int N : c.N_list) {
    const auto tN = Clock::now();
    const double eps = c.d / N;
    say("N = " + std::to_string(N) + ": fine mesh h = " + std::to_string(eps / c.fine_ratio));
    StudyRow row;
    row.N = N;
    row.eps = eps;
    const auto em = stage("direct", [&] {
      return std::make_shared<const EpsMesh>(
          build_eps_mesh(N, c.d, c.left_extent, c.hole, curve, eps / c.fine_ratio));
    });
    row.fine_triangles = em->mesh.triangles.size();
    const FineSolution u = stage("direct", [&] {
      switch (c.variant) {
        case MacroVariant::Flat: return solve_fine_flat(em, c.source, c.solver);
        case MacroVariant::Osc: return solve_fine_osc(em, c.D_minus, c.source, {}, c.solver);
        case MacroVariant::OscTheta: break;
      }
      return solve_fine_osc(em, c.D_minus, c.source, theta, c.solver);
    });
    row.energy_residual = u.energy_residual;
    energy_ok = energy_ok && u.energy_residual <= 1e-9;

    stage("corrector", [&] {
      switch (c.variant) {
        case MacroVariant::Flat: {
          CompositeField A(CompositeKind::A1, m, v0, eps);
          A.with_v1(*v1).with_cell(cell).with_layers(flat_layers, chi);
          row.approx = error_report(u.u, A, c.band);
          row.v0 = error_report(u.u, CompositeField(CompositeKind::V0, m, v0, eps), c.band);
          row.jump = interface_value_jump(A);
          jump_ok = jump_ok && row.jump <= 1e-6 * std::max(v0_max, 1e-300);
          break;
        }
        case MacroVariant::Osc: {
          CompositeField U(CompositeKind::UOsc, m, v0, eps);
          U.with_cell(cell).with_layers(osc_layers, chi);
          row.approx = error_report(u.u, U, c.band);
          row.v0 = error_report(u.u, CompositeField(CompositeKind::V0, m, v0, eps), c.band);
          break;
        }
        case MacroVariant::OscTheta:
          row.approx = error_report(u.u, CompositeField(CompositeKind::V0, m, *v0_theta, eps), c.band);
          row.v0 = error_report(u.u, CompositeField(CompositeKind::V0, m_mean, *v0_mean, eps), c.band);
          break;
      }
      return 0;
    });
    row.seconds = seconds_since(tN);
    char buf[160];
    std::snprintf(buf, sizeof buf, "  triangles %zu, H1 error %.4e, L2 error %.4e, v0 L2 %.4e (%.1f s)",
                  row.fine_triangles, row.approx.h1, row.approx.l2, row.v0.l2, row.seconds);
    say(buf);
    r.rows.push_back(row);
  }
  check("direct.energy_identity", energy_ok);
  if (flat) check("corrector.interface_jump", jump_ok);

  stage("report", [&] {
    r.approx_h1 = fit_column(r.rows, [](const StudyRow& w) { return w.approx.h1; });
    r.approx_l2 = fit_column(r.rows, [](const StudyRow& w) { return w.approx.l2; });
    r.v0_l2 = fit_column(r.rows, [](const StudyRow& w) { return w.v0.l2; });
    r.v0_h1 = fit_column(r.rows, [](const StudyRow& w) { return w.v0.h1; });
    r.v0_interior_h1_minus = fit_column(r.rows, [](const StudyRow& w) { return w.v0.interior_h1_minus; });
    return 0;
  });
  return r;
}

void write_errors_csv(std::ostream& os, const std::vector<StudyRow>& rows, bool v0) {
  os << "eps,l2,h1,l2_minus,l2_plus,h1_minus,h1_plus,interior_h1\n";
  char buf[256];
  for (const auto& r : rows) {
    const ErrorNorms& n = v0 ? r.v0 : r.approx;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.eps, n.l2, n.h1, n.l2_minus,
                  n.l2_plus, n.h1_minus, n.h1_plus, n.interior_h1);
    os << buf;
  }
}

std::string report_to_json(const StudyReport& r) {
  ordered_json j;
  j["ph_report"] = 1;
  j["config_hash"] = hex64(config_hash(r.config));
  j["config"] = ordered_json::parse(config_to_json(r.config));
  j["variant"] = variant_name(r.config.variant);
  j["degenerate"] = r.degenerate;
  j["rho0"] = r.rho0;
  const Constants& k = r.constants;
  ordered_json cj = {{"Ymeas", k.Ymeas}, {"h11", k.h11},  {"h22", k.h22}, {"q1", k.q1},
                     {"q2", k.q2},       {"J1", k.J1},    {"J11", k.J11}, {"J22", k.J22}};
  cj["Jtilde1"] = k.Jtilde1 ? ordered_json(*k.Jtilde1) : ordered_json(nullptr);
  cj["q1_osc"] = k.q1_osc ? ordered_json(*k.q1_osc) : ordered_json(nullptr);
  j["constants"] = cj;
  ordered_json rows = ordered_json::array();
  for (const auto& w : r.rows)
    rows.push_back({{"N", w.N},
                    {"eps", w.eps},
                    {"fine_triangles", w.fine_triangles},
                    {"approx", norms_json(w.approx)},
                    {"v0", norms_json(w.v0)},
                    {"energy_residual", w.energy_residual},
                    {"interface_jump", w.jump}});
  j["rows"] = rows;
  j["rates"] = {{"approx_h1", rate_json(r.approx_h1)},
                {"approx_l2", rate_json(r.approx_l2)},
                {"v0_l2", rate_json(r.v0_l2)},
                {"v0_h1", rate_json(r.v0_h1)},
                {"v0_interior_h1_minus", rate_json(r.v0_interior_h1_minus)}};
  ordered_json diag = ordered_json::object();
  for (const auto& [name, v] : r.diagnostics) diag[name] = v;
  j["diagnostics"] = diag;
  ordered_json inv = ordered_json::object();
  for (const auto& [name, ok] : r.invariants) inv[name] = ok;
  j["invariants"] = inv;
  j["all_invariants_pass"] = r.all_invariants_pass();
  return j.dump(2) + "\n";
}

std::string timings_to_json(const StudyReport& r) {
  ordered_json j;
  j["config_hash"] = hex64(config_hash(r.config));
  j["setup_seconds"] = r.setup_seconds;
  ordered_json rows = ordered_json::array();
  for (const auto& w : r.rows) rows.push_back({{"N", w.N}, {"seconds", w.seconds}});
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

void write_report(const StudyReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(std::filesystem::path(dir) / name);
    if (!os) throw ConfigError("cannot write " + (std::filesystem::path(dir) / name).string());
    return os;
  };
  {
    auto os = open("errors.csv");
    write_errors_csv(os, r.rows, false);
  }
  {
    auto os = open("errors_v0.csv");
    write_errors_csv(os, r.rows, true);
  }
  open("report.json") << report_to_json(r);
  open("timings.json") << timings_to_json(r);
}

}  // namespace phom
