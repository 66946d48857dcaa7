// Command-line front end: one subcommand per pipeline stage plus the full study.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "phom/mesh_io.hpp"
#include "phom/study.hpp"

using namespace phom;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out = "out";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "flat-key JSON config file");
  sub->add_option("--set", c.overrides, "override one key, as key=value (repeatable)");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
}

StudyConfig resolve(const Common& c) {
  StudyConfig cfg = c.config_path.empty() ? StudyConfig{} : load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name);
  if (!os) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
  return os;
}

void emit(const std::string& dir, const std::string& name, const ordered_json& j) {
  open_out(dir, name) << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
}

ordered_json mesh_stats(const TriMesh& m) {
  return {{"vertices", m.num_vertices()}, {"triangles", m.num_triangles()}, {"area", m.total_area()}};
}

LayerOptions layer_options(const StudyConfig& c) {
  LayerOptions lo;
  lo.L_minus = c.L_minus;
  lo.L_plus = c.L_plus;
  lo.h = c.cell_h;
  lo.farfield_tol = c.farfield_tol;
  lo.solver = c.solver;
  return lo;
}

int run_cell(const Common& o) {
  const StudyConfig c = resolve(o);
  const CellSolution cs = solve_cell(c.hole, {c.cell_h, c.solver});
  ordered_json sym = ordered_json::object();
  double worst = 0.0;
  for (const auto& [name, r] : check_symmetries(cs)) {
    sym[name] = r;
    worst = std::max(worst, r);
  }
  emit(o.out, "cell.json",
       {{"Ymeas", cs.Ymeas},
        {"h11", cs.h11},
        {"h22", cs.h22},
        {"h12", cs.h12},
        {"h21", cs.h21},
        {"symmetry_residuals", sym},
        {"mesh_stats", mesh_stats(cs.cell->mesh)}});
  return worst <= 1e-8 ? 0 : 1;
}

ordered_json decay_json(const LayerSolution& s) {
  if (s.decay.identically_zero) return nullptr;
  return {{"rate", s.decay.rate}, {"rate_minus", s.decay.rate_minus}, {"rate_plus", s.decay.rate_plus},
          {"r2", s.decay.r2}};
}

int run_layer(const Common& o) {
  const StudyConfig c = resolve(o);
  const LayerOptions lo = layer_options(c);
  const CellSolution cs = solve_cell(c.hole, {c.cell_h, c.solver});
  const LayerPair p = compute_B1_B2_flat(cs, make_strip(c.hole, InterfaceCurve::flat_curve(), lo), lo);
  const HigherConstants hc = compute_J11_J22(cs, p.B2);
  bool ok = p.B1.truncation_ok && p.B2.truncation_ok && std::abs(p.B2.q) <= 1e-8;
  ordered_json j = {{"q1", p.B1.q}, {"q2", p.B2.q}, {"J1", p.B1.J}, {"J11", hc.J11}, {"J22", hc.J22}};
  j["Jtilde1"] = nullptr;
  ordered_json decay = {{"B1", decay_json(p.B1)}, {"B2", decay_json(p.B2)}};
  ordered_json far = {{"B1", {p.B1.farfield_minus, p.B1.farfield_plus}},
                      {"B2", {p.B2.farfield_minus, p.B2.farfield_plus}}};
  if (c.variant != MacroVariant::Flat) {
    const LayerPair q = compute_B1_B2_osc(cs, make_strip(c.hole, c.curve(), lo), c.D_minus, OscRoute::TotalField, lo);
    j["Jtilde1"] = q.B1.J;
    j["q1_osc"] = q.B1.q;
    decay["B1_osc"] = decay_json(q.B1);
    decay["B2_osc"] = decay_json(q.B2);
    far["B1_osc"] = {q.B1.farfield_minus, q.B1.farfield_plus};
    far["B2_osc"] = {q.B2.farfield_minus, q.B2.farfield_plus};
    ok = ok && q.B1.truncation_ok && q.B2.truncation_ok;
  }
  j["Ymeas"] = cs.Ymeas;
  j["h11"] = cs.h11;
  j["h22"] = cs.h22;
  j["decay_rates"] = decay;
  j["farfield_residuals"] = far;
  j["truncation"] = {{"Lminus", c.L_minus}, {"Lplus", c.L_plus}};
  emit(o.out, "layer.json", j);
  return ok ? 0 : 1;
}

int run_homogenize(const Common& o, const std::vector<std::string>& model_files) {
  const StudyConfig c = resolve(o);
  ordered_json merged = ordered_json::object();
  for (const auto& f : model_files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("cannot read model file " + f);
    merged.update(ordered_json::parse(in));
  }
  for (const char* key : {"Ymeas", "h11", "h22"})
    if (!merged.contains(key)) throw ConfigError(std::string("model files lack '") + key + "' (pass the cell output)");
  MacroModel m;
  m.D_minus = c.D_minus;
  m.Ymeas = merged["Ymeas"];
  m.h11 = merged["h11"];
  m.h22 = merged["h22"];
  m.q1 = merged.value("q1", 0.0);
  m.J11 = merged.value("J11", 0.0);
  m.J22 = merged.value("J22", 0.0);
  m.source = c.source;
  m.d = c.d;
  m.left_extent = c.left_extent;
  if (c.variant == MacroVariant::OscTheta) m.theta_hat = theta_hat(c.theta(), c.curve(), c.d);
  const MacroSolution v0 = solve_v0(m, make_macro_mesh(m, c.macro_h), c.variant, c.solver);
  {
    auto os = open_out(o.out, "v0.field");
    write_field(os, v0.v0);
  }
  bool ok = true;
  ordered_json j = {{"variant", variant_name(c.variant)}, {"v0_max", v0.v0.max_abs()},
                    {"mesh_stats", mesh_stats(v0.mesh->mesh)}};
  if (c.variant == MacroVariant::Flat) {
    const V1Solution v1 = solve_v1_flat(m, v0, make_macro_mesh(m, c.macro_h, true), c.solver);
    auto os = open_out(o.out, "v1.field");
    write_field(os, v1.v1);
    j["v1_jump_defect"] = v1.jump_defect;
    ok = v1.jump_defect <= 1e-9;
  }
  auto csv = open_out(o.out, "interface_trace.csv");
  csv << "x2,v0,dx1_v0_plus,dx1_v0_minus,dx2_v0\n";
  char buf[160];
  for (int k = 0; k <= v0.mesh->ny; ++k) {
    const double x2 = c.d * k / v0.mesh->ny;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x2, v0.trace(x2), v0.dx1_plus(x2),
                  v0.dx1_minus(x2), v0.dx2(x2));
    csv << buf;
  }
  emit(o.out, "homogenize.json", j);
  return ok ? 0 : 1;
}

int run_direct(const Common& o, int N) {
  const StudyConfig c = resolve(o);
  const double eps = c.d / N;
  auto em = std::make_shared<const EpsMesh>(
      build_eps_mesh(N, c.d, c.left_extent, c.hole, c.curve(), eps / c.fine_ratio));
  FineSolution u;
  switch (c.variant) {
    case MacroVariant::Flat: u = solve_fine_flat(em, c.source, c.solver); break;
    case MacroVariant::Osc: u = solve_fine_osc(em, c.D_minus, c.source, {}, c.solver); break;
    case MacroVariant::OscTheta: u = solve_fine_osc(em, c.D_minus, c.source, c.theta(), c.solver); break;
  }
  {
    auto os = open_out(o.out, "u.field");
    write_field(os, u.u);
  }
  emit(o.out, "direct.json",
       {{"variant", variant_name(c.variant)},
        {"N", N},
        {"eps", eps},
        {"energy", u.energy},
        {"energy_residual", u.energy_residual},
        {"solver", solver_name(u.stats.used)},
        {"mesh_stats", mesh_stats(em->mesh)}});
  return u.energy_residual <= 1e-9 ? 0 : 1;
}

int run_study_cmd(const Common& o) {
  StudyConfig c = resolve(o);
  c.out_dir = o.out;
  const StudyReport r = run_study(c, &std::cerr);
  write_report(r, o.out);
  std::cout << report_to_json(r);
  for (const auto& [name, ok] : r.invariants)
    if (!ok) std::cerr << "invariant failed: " << name << "\n";
  return r.all_invariants_pass() ? 0 : 1;
}

int run_mesh_dump(const Common& o, const std::string& kind, int N) {
  const StudyConfig c = resolve(o);
  TriMesh mesh;
  if (kind == "cell") {
    mesh = build_cell_mesh(c.hole, c.cell_h).mesh;
  } else if (kind == "strip") {
    mesh = build_strip_mesh(c.L_minus, c.L_plus, c.hole, c.curve(), c.cell_h).mesh;
  } else if (kind == "eps") {
    const double eps = c.d / N;
    mesh = build_eps_mesh(N, c.d, c.left_extent, c.hole, c.curve(), eps / c.fine_ratio).mesh;
  } else if (kind == "macro") {
    mesh = build_macro_mesh(c.d, c.left_extent, c.macro_h).mesh;
  } else {
    throw ConfigError("mesh kind must be cell, strip, eps or macro");
  }
  check_conforming(mesh);
  {
    auto os = open_out(o.out, kind + ".mesh");
    write_mesh(os, mesh);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(mesh_checksum(mesh)));
  ordered_json j = mesh_stats(mesh);
  j["kind"] = kind;
  j["checksum"] = hex;
  emit(o.out, kind + ".mesh.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenization of Poisson problems in partially perforated domains"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  Common cell_o, layer_o, hom_o, direct_o, study_o, mesh_o;
  auto* cell = app.add_subcommand("cell", "periodic cell correctors and effective coefficients");
  add_common(cell, cell_o);
  auto* layer = app.add_subcommand("layer", "boundary-layer problems and transmission constants");
  add_common(layer, layer_o);
  auto* hom = app.add_subcommand("homogenize", "macro problem v0 (and v1 for the flat interface)");
  add_common(hom, hom_o);
  std::vector<std::string> model_files;
  hom->add_option("--model", model_files, "JSON files with the constants (cell and layer output)")->required();
  auto* direct = app.add_subcommand("direct", "fine-scale reference solve");
  add_common(direct, direct_o);
  int direct_N = 8;
  direct->add_option("--N", direct_N, "cells per unit length")->capture_default_str();
  auto* study = app.add_subcommand("study", "full pipeline and convergence study");
  add_common(study, study_o);
  auto* mesh = app.add_subcommand("mesh-dump", "write a mesh in the PH-MESH format");
  add_common(mesh, mesh_o);
  std::string mesh_kind = "cell";
  int mesh_N = 8;
  mesh->add_option("--kind", mesh_kind, "cell, strip, eps or macro")->capture_default_str();
  mesh->add_option("--N", mesh_N, "cells per unit length for --kind eps")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (print_defaults) {
      std::cout << config_to_json(StudyConfig{}) << "\n";
      return 0;
    }
    if (*cell) return run_cell(cell_o);
    if (*layer) return run_layer(layer_o);
    if (*hom) return run_homogenize(hom_o, model_files);
    if (*direct) return run_direct(direct_o, direct_N);
    if (*study) return run_study_cmd(study_o);
    if (*mesh) return run_mesh_dump(mesh_o, mesh_kind, mesh_N);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
