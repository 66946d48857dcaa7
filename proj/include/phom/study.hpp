#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phom/cell.hpp"
#include "phom/corrector.hpp"
#include "phom/direct.hpp"
#include "phom/homogenized.hpp"
#include "phom/layer.hpp"

namespace phom {

struct StudyConfig {
  MacroVariant variant = MacroVariant::Flat;
  HoleSpec hole = HoleSpec::disk(0.25, 32);
  double d = 1.0;
  double left_extent = 1.0;
  std::vector<int> N_list{8, 16, 32};
  double D_minus = 1.0;
  double amplitude = 0.3;
  SourceSpec source;
  // Interface flux datum Theta(x2, xi2) = base sin^2(pi x2 / d) (1 + modulation cos(2 pi xi2)).
  double theta_base = 1.0;
  double theta_modulation = 0.5;
  double cell_h = 1.0 / 8;  // cell and strip template size, in cell units
  double fine_ratio = 8.0;  // fine mesh size eps / fine_ratio
  double macro_h = 1.0 / 256;
  int L_minus = 6;
  int L_plus = 6;
  double farfield_tol = 1e-6;
  double rho0 = 0.0;  // 0: min(left_extent, d) / 2, clipped to eps_min * L
  double band = 0.2;
  SolveOptions solver;
  std::string out_dir = "out";

  InterfaceCurve curve() const;
  ThetaFn theta() const;
  void validate() const;
};

// Flat-key JSON object ("hole.radius": 0.25, ...). Unknown keys are errors.
StudyConfig parse_config(const std::string& json_text);
StudyConfig load_config(const std::string& path);
std::string config_to_json(const StudyConfig& c);
std::uint64_t config_hash(const StudyConfig& c);
void apply_override(StudyConfig& c, const std::string& key, const std::string& value);

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
  bool low_fit = false;     // r2 below 0.99: not a clean power law
  bool degenerate = false;  // errors vary by less than 0.1% over the eps range
};

// Least-squares slope of log err against log eps; needs three or more positive pairs.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& err);

struct Constants {
  double Ymeas = 0.0;
  double h11 = 0.0;
  double h22 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double J1 = 0.0;
  double J11 = 0.0;
  double J22 = 0.0;
  std::optional<double> Jtilde1;
  std::optional<double> q1_osc;
};

struct StudyRow {
  int N = 0;
  double eps = 0.0;
  std::size_t fine_triangles = 0;
  ErrorNorms approx;  // A1 (flat), U (osc) or theta_hat v0 (osc_theta)
  ErrorNorms v0;      // bare v0; for osc_theta: v0 with the arclength-free datum
  double energy_residual = 0.0;
  double jump = 0.0;  // composite value jump on x1 = 0 (flat only)
  double seconds = 0.0;
};

struct StudyReport {
  StudyConfig config;
  Constants constants;
  std::vector<StudyRow> rows;
  RateFit approx_h1, approx_l2, v0_l2, v0_h1, v0_interior_h1_minus;
  double rho0 = 0.0;
  // Invariant checks of the pipeline stages: name -> pass.
  std::vector<std::pair<std::string, bool>> invariants;
  // Measured quantities behind the invariants (residuals, decay fits).
  std::vector<std::pair<std::string, double>> diagnostics;
  // No hole: the fine problem does not depend on eps, so the rates only
  // measure discretization error.
  bool degenerate = false;
  double setup_seconds = 0.0;

  bool all_invariants_pass() const;
};

// Carries the pipeline stage ("cell", "layer", ...) that failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Full pipeline; progress lines go to `log` when given.
StudyReport run_study(const StudyConfig& c, std::ostream* log = nullptr);

// Norms of the approximation, or of the bare v0 row when `v0` is set.
void write_errors_csv(std::ostream& os, const std::vector<StudyRow>& rows, bool v0);
std::string report_to_json(const StudyReport& r);
std::string timings_to_json(const StudyReport& r);
// errors.csv, errors_v0.csv, report.json and timings.json in dir.
void write_report(const StudyReport& r, const std::string& dir);

}  // namespace phom
