#pragma once

#include <map>
#include <memory>
#include <string>

#include "phom/fem.hpp"
#include "phom/mesh.hpp"

namespace phom {

struct CellOptions {
  double h = 1.0 / 8;
  SolveOptions solver;
};

// Periodic correctors of the perforated cell. Constants h_ab are cell
// averages; the |Y|-weighted forms belong to the macro model.
struct CellSolution {
  std::shared_ptr<const CellMesh> cell;
  FemFunction N1, N2;
  FemFunction N11, N12, N21, N22;
  double Ymeas = 1.0;
  double h11 = 1.0;
  double h22 = 1.0;
  double h12 = 0.0;
  double h21 = 0.0;
  double h11_energy = 1.0;
  double h22_energy = 1.0;
  std::map<std::string, double> h_constants;  // "11", "12", "21", "22"

  // N_i / N_ij by index (1-based as in the notation).
  const FemFunction& N(int i) const { return i == 1 ? N1 : N2; }
  const FemFunction& N(int i, int j) const;
};

std::shared_ptr<const CellMesh> make_cell(const HoleSpec& hole, double h);

// grad N_i . grad phi = -int d_i phi, periodic, zero mean.
std::pair<FemFunction, FemFunction> solve_first_order(std::shared_ptr<const CellMesh> cell,
                                                      const SolveOptions& opts = {});

struct EffectiveCoeffs {
  double h11 = 1.0;
  double h22 = 1.0;
  double h12 = 0.0;
  double h21 = 0.0;
  double Ymeas = 1.0;
  double h11_energy = 1.0;  // <|d1(xi1 + N1)|^2 + |d2 N1|^2>
  double h22_energy = 1.0;
};

EffectiveCoeffs effective_coeffs(const FemFunction& N1, const FemFunction& N2);

// N_ab with h_ab = <delta_ab + d_a N_b>; throws ModelError if the source is
// incompatible beyond 1e-8 (wrong constant).
FemFunction solve_second_order(const FemFunction& N1, const FemFunction& N2, int a, int b, double h_ab,
                               std::shared_ptr<const CellMesh> cell, const SolveOptions& opts = {});

CellSolution solve_cell(const HoleSpec& hole, const CellOptions& opts = {});

// Max residuals of N(S_l xi) -/+ N(xi) against the expected parity for each
// corrector, keys like "N1_S1", "N12_S2".
std::map<std::string, double> check_symmetries(const CellSolution& cs);

}  // namespace phom
