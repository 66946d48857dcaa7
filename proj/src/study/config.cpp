#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "phom/mesh_io.hpp"
#include "phom/study.hpp"

namespace phom {

using nlohmann::ordered_json;

namespace {

MacroVariant parse_variant(const std::string& s) {
  if (s == "flat") return MacroVariant::Flat;
  if (s == "osc") return MacroVariant::Osc;
  if (s == "osc_theta") return MacroVariant::OscTheta;
  throw ConfigError("variant must be flat, osc or osc_theta (got '" + s + "')");
}

SolverKind parse_solver(const std::string& s) {
  for (SolverKind k : {SolverKind::Auto, SolverKind::Dense, SolverKind::SparseDirect, SolverKind::CG})
    if (s == solver_name(k)) return k;
  throw ConfigError("unknown solver '" + s + "'");
}

struct Key {
  const char* name;
  std::function<ordered_json(const StudyConfig&)> get;
  std::function<void(StudyConfig&, const ordered_json&)> set;
};

template <class T>
T as(const ordered_json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for ") + key + ": " + j.dump());
  }
}

#define PH_NUM(key, field)                                                   \
  Key {                                                                      \
    key, [](const StudyConfig& c) { return ordered_json(c.field); },         \
        [](StudyConfig& c, const ordered_json& j) { c.field = as<double>(j, key); } \
  }
#define PH_INT(key, field)                                                   \
  Key {                                                                      \
    key, [](const StudyConfig& c) { return ordered_json(c.field); },         \
        [](StudyConfig& c, const ordered_json& j) { c.field = as<int>(j, key); } \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"variant", [](const StudyConfig& c) { return ordered_json(variant_name(c.variant)); },
       [](StudyConfig& c, const ordered_json& j) { c.variant = parse_variant(as<std::string>(j, "variant")); }},
      {"hole.kind", [](const StudyConfig& c) { return ordered_json(c.hole.empty() ? "none" : "disk"); },
       [](StudyConfig& c, const ordered_json& j) {
         const auto s = as<std::string>(j, "hole.kind");
         if (s == "none") c.hole.kind = HoleSpec::Kind::None;
         else if (s == "disk") c.hole.kind = HoleSpec::Kind::Disk;
         else throw ConfigError("hole.kind must be none or disk");
       }},
      PH_NUM("hole.radius", hole.radius),
      PH_INT("hole.segments", hole.boundary_segments),
      PH_NUM("domain.d", d),
      PH_NUM("domain.left_extent", left_extent),
      {"study.N_list", [](const StudyConfig& c) { return ordered_json(c.N_list); },
       [](StudyConfig& c, const ordered_json& j) { c.N_list = as<std::vector<int>>(j, "study.N_list"); }},
      PH_NUM("model.D_minus", D_minus),
      PH_NUM("curve.amplitude", amplitude),
      PH_NUM("source.rho", source.rho),
      PH_NUM("source.c", source.c),
      PH_NUM("source.minus_x1", source.center_minus.x),
      PH_NUM("source.minus_x2", source.center_minus.y),
      PH_NUM("source.plus_x1", source.center_plus.x),
      PH_NUM("source.plus_x2", source.center_plus.y),
      PH_NUM("theta.base", theta_base),
      PH_NUM("theta.modulation", theta_modulation),
      PH_NUM("mesh.cell_h", cell_h),
      PH_NUM("mesh.fine_ratio", fine_ratio),
      PH_NUM("mesh.macro_h", macro_h),
      PH_INT("layer.L_minus", L_minus),
      PH_INT("layer.L_plus", L_plus),
      PH_NUM("layer.farfield_tol", farfield_tol),
      PH_NUM("cutoff.rho0", rho0),
      PH_NUM("norms.band", band),
      {"solver.kind", [](const StudyConfig& c) { return ordered_json(solver_name(c.solver.kind)); },
       [](StudyConfig& c, const ordered_json& j) { c.solver.kind = parse_solver(as<std::string>(j, "solver.kind")); }},
      PH_NUM("solver.cg_tol", solver.cg_tol),
      PH_INT("solver.cg_max_iter", solver.cg_max_iter),
      {"output.dir", [](const StudyConfig& c) { return ordered_json(c.out_dir); },
       [](StudyConfig& c, const ordered_json& j) { c.out_dir = as<std::string>(j, "output.dir"); }},
  };
  return k;
}

#undef PH_NUM
#undef PH_INT

const Key& find_key(const std::string& name) {
  for (const auto& k : keys())
    if (name == k.name) return k;
  throw ConfigError("unknown config key '" + name + "'");
}

}  // namespace

InterfaceCurve StudyConfig::curve() const {
  return variant == MacroVariant::Flat ? InterfaceCurve::flat_curve() : InterfaceCurve::oscillating(amplitude);
}

ThetaFn StudyConfig::theta() const {
  const double base = theta_base, mod = theta_modulation, dd = d;
  return [=](double x2, double t) {
    const double s = std::sin(std::numbers::pi * x2 / dd);
    return base * s * s * (1.0 + mod * std::cos(2.0 * std::numbers::pi * t));
  };
}

void StudyConfig::validate() const {
  hole.validate();
  curve().validate();
  if (!(d > 0.0) || !(left_extent > 0.0)) throw ConfigError("domain extents must be positive");
  if (N_list.size() < 3) throw ConfigError("study.N_list needs at least three entries for a rate fit");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 2) throw ConfigError("study.N_list entries must be >= 2");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ConfigError("study.N_list must be strictly increasing");
  }
  if (!(D_minus > 0.0)) throw ConfigError("model.D_minus must be positive");
  if (variant == MacroVariant::Flat && D_minus != 1.0)
    throw ConfigError("model.D_minus applies to the oscillating variants; the flat problem has unit conductivity");
  if (!(cell_h > 0.0) || cell_h > 0.25) throw ConfigError("mesh.cell_h must lie in (0, 0.25]");
  if (!(fine_ratio >= 1.0)) throw ConfigError("mesh.fine_ratio must be >= 1");
  if (!(macro_h > 0.0)) throw ConfigError("mesh.macro_h must be positive");
  if (L_minus < 3 || L_plus < 3) throw ConfigError("layer truncation lengths must be >= 3");
  if (rho0 < 0.0) throw ConfigError("cutoff.rho0 must be >= 0");
  if (!(band >= 0.0)) throw ConfigError("norms.band must be >= 0");
  if (!(source.rho > 0.0)) throw ConfigError("source.rho must be positive");
}

StudyConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object of flat keys");
  StudyConfig c;
  // The variant decides defaults of other keys, so it goes first.
  if (j.contains("variant")) find_key("variant").set(c, j["variant"]);
  if (c.variant != MacroVariant::Flat) c.D_minus = 2.0;
  for (auto it = j.begin(); it != j.end(); ++it) find_key(it.key()).set(c, it.value());
  c.validate();
  return c;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const StudyConfig& c) {
  ordered_json j = ordered_json::object();
  for (const auto& k : keys()) j[k.name] = k.get(c);
  return j.dump(2);
}

std::uint64_t config_hash(const StudyConfig& c) { return fnv1a(config_to_json(c)); }

void apply_override(StudyConfig& c, const std::string& key, const std::string& value) {
  const Key& k = find_key(key);
  ordered_json j;
  try {
    j = ordered_json::parse(value);
  } catch (const nlohmann::json::exception&) {
    j = value;
  }
  k.set(c, j);
  if (key == "variant" && c.variant != MacroVariant::Flat && c.D_minus == 1.0) c.D_minus = 2.0;
}

}  // namespace phom
