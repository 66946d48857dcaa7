#include "phom/corrector.hpp"

#include <algorithm>
#include <cmath>

namespace phom {

double CutOff::value(double x1) const {
  const double a = std::abs(x1);
  const double half = 0.5 * rho0;
  if (a <= half) return 1.0;
  if (a >= rho0) return 0.0;
  const double s = (a - half) / half;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double CutOff::derivative(double x1) const {
  const double a = std::abs(x1);
  const double half = 0.5 * rho0;
  if (a <= half || a >= rho0) return 0.0;
  const double s = (a - half) / half;
  const double ds = -30.0 * s * s * (1.0 - s) * (1.0 - s) / half;
  return x1 < 0.0 ? -ds : ds;
}

double admissible_rho0(double default_rho0, double eps_min, int L_minus, int L_plus) {
  return std::min(default_rho0, eps_min * std::min(L_minus, L_plus));
}

CompositeField::CompositeField(CompositeKind kind, const MacroModel& model, const MacroSolution& v0, double eps)
    : kind_(kind), model_(&model), v0_(&v0), eps_(eps) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
}

CompositeField& CompositeField::with_v1(const V1Solution& v1) {
  if (kind_ != CompositeKind::A1) throw ConfigError("v1 enters the flat approximation only");
  v1_ = &v1;
  return *this;
}

CompositeField& CompositeField::with_cell(const CellSolution& cell) {
  cell_ = &cell;
  return *this;
}

CompositeField& CompositeField::with_layers(const LayerPair& layers, CutOff chi) {
  const StripMesh& strip = *layers.B1.strip;
  const double reach = eps_ * std::min(strip.L_minus, strip.L_plus);
  if (chi.rho0 > reach * (1.0 + 1e-12))
    throw ConfigError("cut-off radius " + std::to_string(chi.rho0) + " exceeds the layer truncation " +
                      std::to_string(reach) + " (eps * L); lower rho0 or lengthen the strip");
  if (cell_ && !(cell_->cell->hole.radius == strip.hole.radius &&
                 cell_->cell->hole.boundary_segments == strip.hole.boundary_segments &&
                 cell_->cell->hole.kind == strip.hole.kind))
    throw ConfigError("cell and strip use different holes");
  layers_ = &layers;
  chi_ = chi;
  return *this;
}

CompositeField& CompositeField::with_terms(CompositeTerms terms) {
  terms_ = terms;
  return *this;
}

ValGrad CompositeField::evaluate(Vec2 x, Region side, Vec2 where) const {
  const MacroSolution& v0 = *v0_;
  const double x2 = x.y;
  const bool sliver = kind_ == CompositeKind::UOsc && side == Region::Plus && where.x < 0.0;

  ValGrad out;
  RecoveredField::Sample s;
  if (sliver) {
    // Quadratic Taylor extension of v0+ across x1 = 0.
    const double t1 = v0.dx1_plus(x2);
    const double s11 = second_trace_x1(*model_, v0, x2);
    const double hstep = 1e-5;
    const double ds11 =
        (second_trace_x1(*model_, v0, x2 + hstep) - second_trace_x1(*model_, v0, x2 - hstep)) / (2.0 * hstep);
    out.value = v0.trace(x2) + x.x * t1 + 0.5 * x.x * x.x * s11;
    out.grad = {t1 + x.x * s11, v0.dx2(x2) + x.x * v0.dx1_plus.prime(x2) + 0.5 * x.x * x.x * ds11};
  } else {
    // The bare v0 reference follows the macro regions, split at x1 = 0.
    const Region macro_side = kind_ == CompositeKind::V0 ? (where.x < 0.0 ? Region::Minus : Region::Plus) : side;
    s = v0.v0r.evaluate(x, macro_side);
    out.value = s.value;
    out.grad = s.grad;
  }
  if (kind_ == CompositeKind::V0) return out;

  const double e = eps_;
  if (v1_ && terms_.v1) {
    const ValGrad w = v1_->v1.evaluate(x, side);
    out.value += e * w.value;
    out.grad += w.grad * e;
  }

  const Vec2 xi = x * (1.0 / e);
  const Vec2 wxi = where * (1.0 / e);
  if (cell_ && terms_.cell && side == Region::Plus && !sliver) {
    const double dv[2] = {s.grad.x, s.grad.y};
    const Vec2 ddv[2] = {{s.hess.xx, s.hess.xy}, {s.hess.xy, s.hess.yy}};
    for (int i = 0; i < 2; ++i) {
      const ValGrad n = cell_->N(i + 1).evaluate_near(xi, wxi);
      out.value += e * n.value * dv[i];
      out.grad += n.grad * dv[i] + ddv[i] * (e * n.value);
    }
  }

  if (layers_ && terms_.layer) {
    const StripMesh& strip = *layers_->B1.strip;
    if (wxi.x > -strip.L_minus && wxi.x < strip.L_plus) {
      const double chi = chi_.value(x.x);
      const double dchi = chi_.derivative(x.x);
      const double T[2] = {v0.dx1_plus(x2), v0.dx2(x2)};
      const double dT[2] = {v0.dx1_plus.prime(x2), v0.dx2x2(x2)};
      const LayerSolution* B[2] = {&layers_->B1, &layers_->B2};
      for (int i = 0; i < 2; ++i) {
        if (chi == 0.0 && dchi == 0.0) break;
        const ValGrad b = B[i]->B.evaluate_near(xi, wxi, side);
        out.value += e * chi * b.value * T[i];
        out.grad += b.grad * (chi * T[i]) + Vec2{e * dchi * b.value * T[i], e * chi * b.value * dT[i]};
      }
    }
  }
  return out;
}

ReferenceFn CompositeField::reference(const TriMesh& fine) const {
  return [this, &fine](std::size_t t, Vec2 x) { return evaluate(x, fine.regions[t], fine.centroid(t)); };
}

double interface_value_jump(const CompositeField& f, int n) {
  const double d = f.model().d;
  const double nudge = 1e-7 * f.eps();
  double jump = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x2 = d * (k + 0.5) / n;
    const double a = f.evaluate({0.0, x2}, Region::Minus, {-nudge, x2}).value;
    const double b = f.evaluate({0.0, x2}, Region::Plus, {nudge, x2}).value;
    jump = std::max(jump, std::abs(a - b));
  }
  return jump;
}

ErrorNorms error_report(const FemFunction& u_fine, const CompositeField& approx, double band) {
  return error_norms(u_fine, approx.reference(u_fine.mesh()), band);
}

}  // namespace phom
