#pragma once

#include <optional>

#include "phom/cell.hpp"
#include "phom/homogenized.hpp"
#include "phom/layer.hpp"

namespace phom {

// chi0 = 1 on |x1| <= rho0/2, 0 on |x1| >= rho0, quintic smoothstep between.
struct CutOff {
  double rho0 = 0.5;

  double value(double x1) const;
  double derivative(double x1) const;
};

// Largest admissible cut-off radius: the layer fields must cover the support
// of chi0 at the smallest eps, so rho0 <= eps_min * min(L-, L+).
double admissible_rho0(double default_rho0, double eps_min, int L_minus, int L_plus);

enum class CompositeKind {
  V0,         // v0 only
  A1,         // flat two-term approximation
  UOsc,       // oscillating interface approximation; fine points with x1 < 0
              // in the plus region belong to the sliver branch
};

// Which terms of the flat approximation are included (all by default).
struct CompositeTerms {
  bool v1 = true;
  bool cell = true;
  bool layer = true;
};

// Evaluable composite of macro, cell and layer fields on the physical domain.
// Holds references: every constituent must outlive the field.
class CompositeField {
 public:
  CompositeField(CompositeKind kind, const MacroModel& model, const MacroSolution& v0, double eps);

  CompositeField& with_v1(const V1Solution& v1);
  CompositeField& with_cell(const CellSolution& cell);
  CompositeField& with_layers(const LayerPair& layers, CutOff chi);
  CompositeField& with_terms(CompositeTerms terms);

  // Value and gradient at x in region `side`; `where` is a point of the same
  // fine element (used to pick elements of the cell and layer meshes when x
  // sits on an element edge).
  ValGrad evaluate(Vec2 x, Region side, Vec2 where) const;
  ValGrad evaluate(Vec2 x, Region side) const { return evaluate(x, side, x); }

  // Reference for error_norms on a fine mesh.
  ReferenceFn reference(const TriMesh& fine) const;

  CompositeKind kind() const { return kind_; }
  const MacroModel& model() const { return *model_; }
  double eps() const { return eps_; }

 private:
  CompositeKind kind_;
  const MacroModel* model_;
  const MacroSolution* v0_;
  double eps_;
  const V1Solution* v1_ = nullptr;
  const CellSolution* cell_ = nullptr;
  const LayerPair* layers_ = nullptr;
  CutOff chi_;
  CompositeTerms terms_;
};

// Max over n points of x1 = 0 of |A(0-, x2) - A(0+, x2)|.
double interface_value_jump(const CompositeField& f, int n = 100);

ErrorNorms error_report(const FemFunction& u_fine, const CompositeField& approx, double band = 0.2);

}  // namespace phom
