#pragma once

#include <functional>
#include <limits>
#include <memory>

#include "phom/cell.hpp"
#include "phom/fem.hpp"
#include "phom/mesh.hpp"

namespace phom {

// Data of a two-sided strip problem
//   div(A grad B) = 0,  B+ - B- = Phi + q,  (grad B+ - D- grad B-) . nu = Psi + J tau
// on the interface curve (nu points from minus to plus). Strips built with a
// split inner line xi1 = 0 carry a second jump line with its own data; no J
// there. Psi and tau receive the point and the unit normal of the edge.
struct JumpData {
  using PointFn = std::function<double(Vec2)>;
  using FluxFn = std::function<double(Vec2 x, Vec2 nu)>;

  PointFn Phi = [](Vec2) { return 0.0; };
  FluxFn Psi = [](Vec2, Vec2) { return 0.0; };
  FluxFn tau = [](Vec2, Vec2) { return 1.0; };
  PointFn Phi_inner = [](Vec2) { return 0.0; };
  FluxFn Psi_inner = [](Vec2, Vec2) { return 0.0; };
  double D_minus = 1.0;
};

struct LayerOptions {
  int L_minus = 6;
  int L_plus = 6;
  double h = 1.0 / 8;
  double farfield_tol = 1e-6;
  bool throw_on_truncation = false;
  SolveOptions solver;
};

struct DecayFit {
  double rate = std::numeric_limits<double>::infinity();  // min over both sides
  double rate_minus = std::numeric_limits<double>::infinity();
  double rate_plus = std::numeric_limits<double>::infinity();
  double r2 = 1.0;  // min over both sides
  bool identically_zero = true;
};

struct LayerSolution {
  std::shared_ptr<const StripMesh> strip;
  // Decaying normalization. Values on the sliver of an oscillating strip hold
  // the total field B+ + N_i (see compute_B1_B2_osc).
  FemFunction B;
  double q = 0.0;
  double J = 0.0;
  double c_minus = 0.0;
  double c_plus = 0.0;
  double farfield_minus = 0.0;  // max |B| on the outer half-cell slab / max |B|
  double farfield_plus = 0.0;
  bool truncation_ok = true;
  DecayFit decay;

  double max_abs() const { return B.max_abs(); }
  // B at strip point xi (side picks the branch on the interface curve);
  // zero beyond the truncation.
  ValGrad evaluate(Vec2 xi, Region side) const;
};

std::shared_ptr<const StripMesh> make_strip(const HoleSpec& hole, const InterfaceCurve& curve, const LayerOptions& o,
                                            StripOptions so = {});

// J = -(int_lambda Psi dl + int_inner Psi_inner dl) / int_lambda tau dl.
double compute_J(const StripMesh& strip, const JumpData& jump);

LayerSolution solve_strip(std::shared_ptr<const StripMesh> strip, const JumpData& jump, double J,
                          const LayerOptions& o = {});

// Slab maxima m_k of |B| over distance (k-1, k) from the interface, fitted as
// log m_k linear in k over k = first..last on each side.
DecayFit estimate_decay(const StripMesh& strip, const FemFunction& B, int first = 2, int last = 5);

struct LayerPair {
  LayerSolution B1;
  LayerSolution B2;
};

// Flat interface: Phi = -N_i(0, xi2), Psi = -(d1 N_i + delta_i1)(0, xi2), tau = 1.
LayerPair compute_B1_B2_flat(const CellSolution& cell, std::shared_ptr<const StripMesh> strip,
                             const LayerOptions& o = {});

enum class OscRoute {
  // Unknown B+ + N_i on the solid sliver l(xi2) < xi1 < 0; the jump of N_i
  // moves to xi1 = 0 where the cell field is defined. Works for any amplitude.
  TotalField,
  // Traces of N_i on the curve itself; needs the curve to clear the lattice holes.
  TraceOnCurve,
};

// Oscillating interface: tau = nu1, flux datum (D- - 1) nu2 for B2.
LayerPair compute_B1_B2_osc(const CellSolution& cell, std::shared_ptr<const StripMesh> strip, double D_minus,
                            OscRoute route = OscRoute::TotalField, const LayerOptions& o = {});

struct HigherConstants {
  double J11 = 0.0;
  double J22 = 0.0;
  double J22_trace = 0.0;   // int_gamma d1 N22
  double J22_volume = 0.0;  // int d2 B2 over the strip
  double J22_tail = 0.0;    // contribution of the outermost cell on each side
};

// J11 = int_gamma (d1 N11 + N1), J22 = int_gamma d1 N22 + int d2 B2.
HigherConstants compute_J11_J22(const CellSolution& cell, const LayerSolution& B2_flat);

enum class TraceKind {
  // Flux recovered from the cell-equation residual at the boundary vertices
  // (the trace used for all layer data).
  Conservative,
  // Gradient of the P1 field in the triangles touching xi1 = 0; first order.
  Pointwise,
};

// int_gamma (d1 N1 + 1)(0, xi2) d xi2 on the strip interface.
double interface_flux_J1(const CellSolution& cell, const StripMesh& strip,
                         TraceKind kind = TraceKind::Conservative);

// Max of |B(S xi) -/+ B(xi)| for the reflection xi2 -> 1 - xi2.
double strip_parity_residual(const LayerSolution& s, double sign);

}  // namespace phom
