#include "phom/layer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace phom {

namespace {

const double kGauss = 0.5 / std::sqrt(3.0);

// Unit normal of a tagged edge pointing away from the triangle that owns it
// (the edge lists keep the owner's counter-clockwise orientation).
Vec2 edge_normal(const TriMesh& m, const Edge& e) {
  const Vec2 d = m.vertices[e[1]] - m.vertices[e[0]];
  return Vec2{d.y, -d.x} * (1.0 / norm(d));
}

double line_integral(const TriMesh& m, const std::vector<Edge>& edges, const JumpData::FluxFn& g) {
  double s = 0.0;
  for (const auto& e : edges) {
    const Vec2 p = m.vertices[e[0]];
    const Vec2 q = m.vertices[e[1]];
    const Vec2 nu = edge_normal(m, e);
    const double len = norm(q - p);
    for (double lam : {0.5 - kGauss, 0.5 + kGauss}) s += 0.5 * len * g(p + (q - p) * lam, nu);
  }
  return s;
}

Vec line_load(const TriMesh& m, const std::vector<Edge>& edges, const JumpData::FluxFn& g) {
  std::vector<Vec2> normals;
  normals.reserve(edges.size());
  for (const auto& e : edges) normals.push_back(edge_normal(m, e));
  return assemble_line_load(m, edges, [&](Vec2 x, std::size_t k) { return g(x, normals[k]); });
}

std::vector<Region> vertex_regions(const TriMesh& m) {
  std::vector<Region> r(m.vertices.size(), Region::Plus);
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    if (m.regions[t] == Region::Minus)
      for (int v : m.triangles[t]) r[v] = Region::Minus;
  return r;
}

// Trace on xi1 = 0 of a periodic cell field. The line is interior to the
// periodic medium, so the gradients of the triangles on both sides of it
// (xi1 = 0+ and xi1 = 1-) are averaged.
ValGrad plus_trace(const FemFunction& N, double y) {
  ValGrad r = N.evaluate_near({0.0, y}, {1e-9, y});
  r.grad = 0.5 * (r.grad + N.evaluate_near({1.0, y}, {1.0 - 1e-9, y}).grad);
  return r;
}

// Normal flux (d1 N_i + delta_i1)(0, xi2) of a first-order cell field,
// recovered from the residual of the cell equation at the vertices of the side
// xi1 = 0: r_j = int (grad N_i + e_i) . grad phi_j over the cell, divided by
// the dual length of vertex j. Piecewise linear and periodic in xi2; its
// integral is the discrete cell flux.
class FluxTrace {
 public:
  FluxTrace(const CellSolution& cell, int i) {
    const TriMesh& m = cell.cell->mesh;
    const FemFunction& N = cell.N(i);
    const Vec2 e = i == 1 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    std::map<long, double> r;  // keyed by xi2 on a fine integer grid
    auto key = [](double y) {
      const long k = std::lround(y * 1e9);
      return k == 1000000000L ? 0L : k;
    };
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& tri = m.triangles[t];
      const auto g = hat_gradients(m, t);
      const Vec2 flux = N.gradient(t) + e;
      for (int k = 0; k < 3; ++k) {
        const Vec2 v = m.vertices[tri[k]];
        if (std::abs(v.x) > 1e-12) continue;
        r[key(v.y)] += m.area(t) * dot(flux, g[k]);
      }
    }
    if (r.size() < 2) throw ModelError("cell has no boundary vertices on xi1 = 0");
    for (const auto& [k, v] : r) {
      y_.push_back(k * 1e-9);
      value_.push_back(v);
    }
    const std::size_t n = y_.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double below = j == 0 ? y_[0] + 1.0 - y_[n - 1] : y_[j] - y_[j - 1];
      const double above = j + 1 == n ? y_[0] + 1.0 - y_[j] : y_[j + 1] - y_[j];
      value_[j] = -value_[j] / (0.5 * (below + above));
    }
  }

  double operator()(double y) const {
    y -= std::floor(y);
    const std::size_t n = y_.size();
    const auto it = std::upper_bound(y_.begin(), y_.end(), y);
    const std::size_t hi = it == y_.end() ? 0 : static_cast<std::size_t>(it - y_.begin());
    const std::size_t lo = hi == 0 ? n - 1 : hi - 1;
    double y0 = y_[lo], y1 = y_[hi];
    if (y1 <= y0) y1 += 1.0;
    if (y < y0) y += 1.0;
    const double s = (y - y0) / (y1 - y0);
    return (1.0 - s) * value_[lo] + s * value_[hi];
  }

 private:
  std::vector<double> y_;
  std::vector<double> value_;
};

}  // namespace

ValGrad LayerSolution::evaluate(Vec2 xi, Region side) const {
  if (xi.x <= -strip->L_minus || xi.x >= strip->L_plus) return {};
  return B.evaluate(xi, side);
}

std::shared_ptr<const StripMesh> make_strip(const HoleSpec& hole, const InterfaceCurve& curve, const LayerOptions& o,
                                            StripOptions so) {
  return std::make_shared<const StripMesh>(build_strip_mesh(o.L_minus, o.L_plus, hole, curve, o.h, so));
}

double compute_J(const StripMesh& strip, const JumpData& jump) {
  const TriMesh& m = strip.mesh;
  const double wt = line_integral(m, m.edges("interface"), jump.tau);
  if (std::abs(wt) < 1e-14) throw ModelError("flux weight integrates to zero on the interface");
  double psi = line_integral(m, m.edges("interface"), jump.Psi);
  if (!strip.inner.pairs.empty()) psi += line_integral(m, m.edges("inner"), jump.Psi_inner);
  return -psi / wt;
}

LayerSolution solve_strip(std::shared_ptr<const StripMesh> strip, const JumpData& jump, double J,
                          const LayerOptions& o) {
  const TriMesh& m = strip->mesh;
  const auto mesh = std::shared_ptr<const TriMesh>(strip, &strip->mesh);
  if (!(jump.D_minus > 0.0)) throw ModelError("D_minus must be positive");
  const SpMat K = assemble_stiffness(m, DiffusionTensor::regionwise(jump.D_minus, jump.D_minus, 1.0, 1.0));

  // a(W, phi) = -int [flux] phi on every jump line.
  Vec f = -line_load(m, m.edges("interface"), [&](Vec2 x, Vec2 nu) { return jump.Psi(x, nu) + J * jump.tau(x, nu); });
  if (!strip->inner.pairs.empty()) f -= line_load(m, m.edges("inner"), jump.Psi_inner);

  ConstraintSet c;
  c.periodic = {strip->py};
  c.zero_mean = true;
  for (const auto& [a, b] : strip->interface.pairs) c.jumps.push_back({a, b, jump.Phi(m.vertices[a])});
  for (const auto& [a, b] : strip->inner.pairs) c.jumps.push_back({a, b, jump.Phi_inner(m.vertices[a])});
  const Vec W = solve_constrained(m, K, f, c, o.solver);

  // Far-field constants: averages over the outermost half-cell slabs.
  const double xl = -strip->L_minus + 0.5;
  const double xr = strip->L_plus - 0.5;
  double int_m = 0.0, area_m = 0.0, int_p = 0.0, area_p = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const Vec2 cen = m.centroid(t);
    const auto& tri = m.triangles[t];
    const double a = m.area(t);
    const double avg = (W[tri[0]] + W[tri[1]] + W[tri[2]]) / 3.0;
    if (m.regions[t] == Region::Minus && cen.x < xl) {
      int_m += a * avg;
      area_m += a;
    } else if (m.regions[t] == Region::Plus && cen.x > xr) {
      int_p += a * avg;
      area_p += a;
    }
  }
  LayerSolution s;
  s.strip = strip;
  s.J = J;
  s.c_minus = int_m / area_m;
  s.c_plus = int_p / area_p;
  s.q = s.c_minus - s.c_plus;

  const auto vreg = vertex_regions(m);
  Vec B(W.size());
  for (Eigen::Index v = 0; v < W.size(); ++v) B[v] = W[v] - (vreg[v] == Region::Minus ? s.c_minus : s.c_plus);
  s.B = FemFunction(mesh, std::move(B), {0.0, 1.0});

  const double bmax = s.B.max_abs();
  double end_m = 0.0, end_p = 0.0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const double x = m.vertices[v].x;
    if (x <= xl) end_m = std::max(end_m, std::abs(s.B.values()[v]));
    if (x >= xr) end_p = std::max(end_p, std::abs(s.B.values()[v]));
  }
  s.farfield_minus = bmax > 0.0 ? end_m / bmax : 0.0;
  s.farfield_plus = bmax > 0.0 ? end_p / bmax : 0.0;
  s.truncation_ok = s.farfield_minus <= o.farfield_tol && s.farfield_plus <= o.farfield_tol;
  if (!s.truncation_ok && o.throw_on_truncation)
    throw ModelError("layer solution does not settle at the truncation ends (residuals " +
                     std::to_string(s.farfield_minus) + ", " + std::to_string(s.farfield_plus) +
                     "); increase the strip length");
  s.decay = estimate_decay(*strip, s.B, 2, std::min(5, std::min(strip->L_minus, strip->L_plus) - 1));
  return s;
}

DecayFit estimate_decay(const StripMesh& strip, const FemFunction& B, int first, int last) {
  DecayFit fit;
  const TriMesh& m = strip.mesh;
  if (B.max_abs() == 0.0) return fit;
  fit.identically_zero = false;
  const auto vreg = vertex_regions(m);
  const int L = std::max(strip.L_minus, strip.L_plus);
  std::vector<double> mk[2] = {std::vector<double>(L + 1, 0.0), std::vector<double>(L + 1, 0.0)};
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const int side = vreg[v] == Region::Minus ? 0 : 1;
    const double dist = std::abs(m.vertices[v].x);
    const int k = std::max(1, static_cast<int>(std::ceil(dist)));
    if (k <= L) mk[side][k] = std::max(mk[side][k], std::abs(B.values()[v]));
  }
  double rates[2];
  double r2[2];
  for (int side = 0; side < 2; ++side) {
    std::vector<double> xs, ys;
    for (int k = first; k <= last; ++k)
      if (mk[side][k] > 0.0) {
        xs.push_back(k);
        ys.push_back(std::log(mk[side][k]));
      }
    if (xs.size() < 2) {
      rates[side] = std::numeric_limits<double>::infinity();
      r2[side] = 1.0;
      continue;
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    rates[side] = -slope;
    r2[side] = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  }
  fit.rate_minus = rates[0];
  fit.rate_plus = rates[1];
  fit.rate = std::min(rates[0], rates[1]);
  fit.r2 = std::min(r2[0], r2[1]);
  return fit;
}

LayerPair compute_B1_B2_flat(const CellSolution& cell, std::shared_ptr<const StripMesh> strip,
                             const LayerOptions& o) {
  if (!strip->curve.flat()) throw ModelError("flat layer problems need a flat strip");
  LayerPair out;
  for (int i = 1; i <= 2; ++i) {
    const FemFunction& N = cell.N(i);
    const FluxTrace flux(cell, i);
    JumpData jd;
    jd.Phi = [&N](Vec2 x) { return -N.evaluate({0.0, x.y}).value; };
    jd.Psi = [&flux](Vec2 x, Vec2) { return -flux(x.y); };
    jd.tau = [](Vec2, Vec2) { return 1.0; };
    const double J = compute_J(*strip, jd);
    (i == 1 ? out.B1 : out.B2) = solve_strip(strip, jd, J, o);
  }
  return out;
}

LayerPair compute_B1_B2_osc(const CellSolution& cell, std::shared_ptr<const StripMesh> strip, double D_minus,
                            OscRoute route, const LayerOptions& o) {
  const bool has_inner = !strip->inner.pairs.empty();
  if (route == OscRoute::TotalField && !has_inner && !strip->curve.flat())
    throw ModelError("the total-field formulation needs a strip with a split inner line");
  if (route == OscRoute::TraceOnCurve) {
    if (has_inner) throw ModelError("the trace-on-curve formulation needs a strip without an inner line");
    if (lattice_clearance(strip->curve, strip->hole) <= 0.0)
      throw GeometryError("interface curve crosses the periodic hole lattice; use the total-field formulation");
  }
  LayerPair out;
  for (int i = 1; i <= 2; ++i) {
    const FemFunction& N = cell.N(i);
    const double bulk = i == 2 ? D_minus - 1.0 : 0.0;
    const double shift = i == 1 ? 1.0 : 0.0;
    const FluxTrace flux(cell, i);
    JumpData jd;
    jd.D_minus = D_minus;
    jd.tau = [](Vec2, Vec2 nu) { return nu.x; };
    auto inner_phi = [&N](Vec2 x) { return -N.evaluate({0.0, x.y}).value; };
    auto inner_psi = [&flux, shift](Vec2 x, Vec2) { return shift - flux(x.y); };
    if (route == OscRoute::TraceOnCurve) {
      jd.Phi = [&N](Vec2 x) { return -N.evaluate(x).value; };
      jd.Psi = [&N, bulk](Vec2 x, Vec2 nu) { return -dot(N.evaluate(x).grad, nu) + bulk * nu.y; };
    } else if (has_inner) {
      jd.Psi = [bulk](Vec2, Vec2 nu) { return bulk * nu.y; };
      jd.Phi_inner = inner_phi;
      jd.Psi_inner = inner_psi;
    } else {
      // Flat curve: the sliver is empty and both lines coincide.
      jd.Phi = inner_phi;
      jd.Psi = [=](Vec2 x, Vec2 nu) { return bulk * nu.y + inner_psi(x, nu); };
    }
    const double J = compute_J(*strip, jd);
    (i == 1 ? out.B1 : out.B2) = solve_strip(strip, jd, J, o);
  }
  return out;
}

double interface_flux_J1(const CellSolution& cell, const StripMesh& strip, TraceKind kind) {
  if (kind == TraceKind::Pointwise)
    return line_integral(strip.mesh, strip.mesh.edges("interface"),
                         [&](Vec2 x, Vec2) { return plus_trace(cell.N1, x.y).grad.x + 1.0; });
  const FluxTrace flux(cell, 1);
  return line_integral(strip.mesh, strip.mesh.edges("interface"), [&](Vec2 x, Vec2) { return flux(x.y); });
}

HigherConstants compute_J11_J22(const CellSolution& cell, const LayerSolution& B2) {
  const StripMesh& strip = *B2.strip;
  if (!strip.curve.flat()) throw ModelError("J11 and J22 are defined for the flat interface");
  const TriMesh& m = strip.mesh;
  const auto& gamma = m.edges("interface");
  HigherConstants hc;
  hc.J11 = line_integral(m, gamma, [&](Vec2 x, Vec2) {
    return plus_trace(cell.N11, x.y).grad.x + cell.N1.evaluate({0.0, x.y}).value;
  });
  hc.J22_trace = line_integral(m, gamma, [&](Vec2 x, Vec2) { return plus_trace(cell.N22, x.y).grad.x; });
  double tail = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const double c = m.area(t) * B2.B.gradient(t).y;
    hc.J22_volume += c;
    const double x = m.centroid(t).x;
    if (x < -strip.L_minus + 1.0 || x > strip.L_plus - 1.0) tail += c;
  }
  hc.J22_tail = tail;
  hc.J22 = hc.J22_trace + hc.J22_volume;
  return hc;
}

double strip_parity_residual(const LayerSolution& s, double sign) {
  const auto map = mirror_map(s.strip->mesh, 1, 0.5);
  const Vec& v = s.B.values();
  double r = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0) throw InvariantError("strip mesh is not mirror symmetric");
    r = std::max(r, std::abs(v[map[i]] - sign * v[i]));
  }
  return r;
}

}  // namespace phom
