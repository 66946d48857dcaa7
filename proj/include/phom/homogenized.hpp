#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "phom/fem.hpp"
#include "phom/geometry.hpp"
#include "phom/mesh.hpp"

namespace phom {

// Smooth bump c exp(-1 / (1 - |z|^2)) with z = (x - center) / rho, zero for |z| >= 1.
struct SourceSpec {
  Vec2 center_minus{-0.5, 0.5};
  Vec2 center_plus{0.5, 0.5};
  double rho = 0.3;
  double c = 1.0;
};

struct SourceFields {
  std::function<double(Vec2)> minus;
  std::function<double(Vec2)> plus;
};

double bump(Vec2 z);
SourceFields source_fields(const SourceSpec& s);

// Cubic spline on a uniform grid of [0, d].
class Spline1D {
 public:
  Spline1D() = default;
  Spline1D(std::vector<double> values, double x0, double step);
  double operator()(double x) const;
  double prime(double x) const;
  double double_prime(double x) const;
  bool empty() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }
  double x0() const { return x0_; }
  double step() const { return step_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::vector<double> values_;
  double x0_ = 0.0;
  double step_ = 1.0;
};

enum class MacroVariant { Flat, Osc, OscTheta };
const char* variant_name(MacroVariant v);

struct MacroModel {
  double D_minus = 1.0;
  double Ymeas = 1.0;
  double h11 = 1.0;
  double h22 = 1.0;
  double q1 = 0.0;
  double J11 = 0.0;
  double J22 = 0.0;
  Spline1D theta_hat;  // used by OscTheta only
  SourceSpec source;
  double d = 1.0;
  double left_extent = 1.0;

  // diag(D-, D-) on the minus side (1 for Flat), diag(|Y| h11, |Y| h22) on the plus side.
  DiffusionTensor tensor(MacroVariant v) const;
  void validate() const;
};

struct Hessian {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

// Region-wise gradient recovery of a P1 field: nodal gradients are area
// averages over the triangles of one region, so vertices on the interface
// keep one recovered gradient per side. Gives a continuous gradient inside
// each region and a piecewise constant Hessian.
class RecoveredField {
 public:
  RecoveredField() = default;
  explicit RecoveredField(const FemFunction& u);

  struct Sample {
    double value = 0.0;
    Vec2 grad;  // recovered
    Hessian hess;
  };
  Sample evaluate(Vec2 x, Region side) const;
  const FemFunction& raw() const { return u_; }
  // Replaces the recovered gradient of one side at vertex v.
  void set_gradient(Region side, int v, Vec2 g) { grad_[static_cast<int>(side)][v] = g; }

 private:
  FemFunction u_;
  std::vector<Vec2> grad_[2];
};

struct MacroSolution {
  std::shared_ptr<const MacroMesh> mesh;
  MacroVariant variant = MacroVariant::Flat;
  FemFunction v0;
  RecoveredField v0r;
  // Traces on x1 = 0 as functions of x2: v0, d1 v0+ and d1 v0-.
  Spline1D trace;
  Spline1D dx1_plus;
  Spline1D dx1_minus;
  SolveStats stats;

  double dx2(double x2) const { return trace.prime(x2); }
  double dx2x2(double x2) const { return trace.double_prime(x2); }
};

// d1^2 v0+ on x1 = 0 from h11 d1^2 v0+ + h22 d2^2 v0+ = f+.
double second_trace_x1(const MacroModel& m, const MacroSolution& s, double x2);

std::shared_ptr<const MacroMesh> make_macro_mesh(const MacroModel& m, double h, bool duplicated = false);

// div(A grad v0) = w f with w = 1 (minus), |Y| (plus); v0 = 0 on the boundary;
// OscTheta adds the interface flux jump (A- grad v0- - A+ grad v0+) . e1 = theta_hat.
MacroSolution solve_v0(const MacroModel& m, std::shared_ptr<const MacroMesh> mesh, MacroVariant variant,
                       const SolveOptions& opts = {});

struct V1Solution {
  std::shared_ptr<const MacroMesh> mesh;  // duplicated interface
  FemFunction v1;
  double jump_defect = 0.0;  // max |v1- - v1+ - q1 d1 v0+| at interface nodes
};

// Homogeneous equation with v1- = v1+ + q1 d1 v0+ and
// (grad v1- - A+ grad v1+) . e1 = J11 d1^2 v0+ + J22 d2^2 v0+ on x1 = 0.
V1Solution solve_v1_flat(const MacroModel& m, const MacroSolution& v0, std::shared_ptr<const MacroMesh> dup_mesh,
                         const SolveOptions& opts = {});

// int_0^1 Theta(x2, t) sqrt(1 + l'(t)^2) dt tabulated at n + 1 points of
// [0, d] with the 64-point trapezoid rule in t (periodic integrand).
using ThetaFn = std::function<double(double x2, double t)>;
Spline1D theta_hat(const ThetaFn& theta, const InterfaceCurve& curve, double d, int n = 256, int quad_points = 64);

// Variant without the arclength factor, for comparison studies.
Spline1D theta_mean(const ThetaFn& theta, double d, int n = 256, int quad_points = 64);

}  // namespace phom
