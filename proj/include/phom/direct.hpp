#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "phom/fem.hpp"
#include "phom/homogenized.hpp"
#include "phom/mesh.hpp"

namespace phom {

struct FineSolution {
  std::shared_ptr<const EpsMesh> mesh;
  FemFunction u;
  SolveStats stats;
  double energy = 0.0;           // a(u, u)
  double energy_residual = 0.0;  // |a(u, u) - l(u)| / |a(u, u)|, l the load functional
};

// Delta u = f on the perforated domain, du/dn = 0 on the holes, u = 0 outside.
FineSolution solve_fine_flat(std::shared_ptr<const EpsMesh> mesh, const SourceSpec& source,
                             const SolveOptions& opts = {});

// Flux weight D- on the minus side. With theta, the flux jump on the interface
// curve is D- du-/dn - du+/dn = theta(x2, x2 / eps), n pointing into the plus side.
using FineThetaFn = std::function<double(double x2, double xi2)>;
FineSolution solve_fine_osc(std::shared_ptr<const EpsMesh> mesh, double D_minus, const SourceSpec& source,
                            const FineThetaFn& theta = {}, const SolveOptions& opts = {});

}  // namespace phom
