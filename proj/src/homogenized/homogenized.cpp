#include "phom/homogenized.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>

namespace phom {

double bump(Vec2 z) {
  const double r2 = dot(z, z);
  return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

SourceFields source_fields(const SourceSpec& s) {
  if (!(s.rho > 0.0)) throw ConfigError("source radius must be positive");
  SourceFields f;
  f.minus = [s](Vec2 x) { return s.c * bump((x - s.center_minus) * (1.0 / s.rho)); };
  f.plus = [s](Vec2 x) { return s.c * bump((x - s.center_plus) * (1.0 / s.rho)); };
  return f;
}

struct Spline1D::Impl {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
  double lo;
  double hi;
};

Spline1D::Spline1D(std::vector<double> values, double x0, double step)
    : values_(std::move(values)), x0_(x0), step_(step) {
  if (values_.size() < 4) throw ModelError("spline needs at least four samples");
  auto impl = std::make_shared<Impl>(Impl{{values_.begin(), values_.end(), x0, step}, x0,
                                          x0 + step * static_cast<double>(values_.size() - 1)});
  impl_ = std::move(impl);
}

double Spline1D::operator()(double x) const { return impl_->s(std::clamp(x, impl_->lo, impl_->hi)); }
double Spline1D::prime(double x) const { return impl_->s.prime(std::clamp(x, impl_->lo, impl_->hi)); }
double Spline1D::double_prime(double x) const {
  return impl_->s.double_prime(std::clamp(x, impl_->lo, impl_->hi));
}

const char* variant_name(MacroVariant v) {
  switch (v) {
    case MacroVariant::Flat: return "flat";
    case MacroVariant::Osc: return "osc";
    case MacroVariant::OscTheta: return "osc_theta";
  }
  return "?";
}

DiffusionTensor MacroModel::tensor(MacroVariant v) const {
  const double dm = v == MacroVariant::Flat ? 1.0 : D_minus;
  return DiffusionTensor::regionwise(dm, dm, Ymeas * h11, Ymeas * h22);
}

void MacroModel::validate() const {
  if (!(D_minus > 0.0) || !(Ymeas > 0.0) || !(h11 > 0.0) || !(h22 > 0.0))
    throw ModelError("macro tensor is not positive definite");
  for (double c : {q1, J11, J22})
    if (!std::isfinite(c)) throw ModelError("transmission constants must be finite");
  if (!(d > 0.0) || !(left_extent > 0.0)) throw ModelError("invalid macro domain");
}

RecoveredField::RecoveredField(const FemFunction& u) : u_(u) {
  const TriMesh& m = u.mesh();
  for (auto& g : grad_) g.assign(m.vertices.size(), Vec2{});
  std::vector<double> w[2] = {std::vector<double>(m.vertices.size(), 0.0),
                              std::vector<double>(m.vertices.size(), 0.0)};
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const int r = static_cast<int>(m.regions[t]);
    const double a = m.area(t);
    const Vec2 g = u.gradient(t);
    for (int v : m.triangles[t]) {
      grad_[r][v] += g * a;
      w[r][v] += a;
    }
  }
  for (int r = 0; r < 2; ++r)
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
      if (w[r][v] > 0.0) grad_[r][v] = grad_[r][v] * (1.0 / w[r][v]);
}

RecoveredField::Sample RecoveredField::evaluate(Vec2 x, Region side) const {
  const long t = u_.locate(x, side);
  if (t < 0) throw EvaluationError("point outside the macro mesh");
  const TriMesh& m = u_.mesh();
  const auto& tri = m.triangles[t];
  const auto& G = grad_[static_cast<int>(m.regions[t])];
  const auto l = barycentric(m, t, x);
  const auto hg = hat_gradients(m, t);
  Sample s;
  s.value = u_.evaluate_in(t, x).value;
  for (int k = 0; k < 3; ++k) {
    const Vec2 g = G[tri[k]];
    s.grad += g * l[k];
    s.hess.xx += g.x * hg[k].x;
    s.hess.yy += g.y * hg[k].y;
    s.hess.xy += 0.5 * (g.x * hg[k].y + g.y * hg[k].x);
  }
  return s;
}

double second_trace_x1(const MacroModel& m, const MacroSolution& s, double x2) {
  const double fplus = source_fields(m.source).plus({0.0, x2});
  return (fplus - m.h22 * s.dx2x2(x2)) / m.h11;
}

std::shared_ptr<const MacroMesh> make_macro_mesh(const MacroModel& m, double h, bool duplicated) {
  return std::make_shared<const MacroMesh>(build_macro_mesh(m.d, m.left_extent, h, duplicated));
}

MacroSolution solve_v0(const MacroModel& m, std::shared_ptr<const MacroMesh> mesh, MacroVariant variant,
                       const SolveOptions& opts) {
  m.validate();
  if (mesh->duplicated) throw ModelError("v0 is continuous; use the plain macro mesh");
  if (mesh->nx_minus < 2 || mesh->nx_plus < 2 || mesh->ny < 3) throw ModelError("macro mesh too coarse");
  if (variant == MacroVariant::OscTheta && m.theta_hat.empty()) throw ModelError("osc_theta needs theta_hat");
  const TriMesh& tm = mesh->mesh;
  const SourceFields f = source_fields(m.source);
  const SpMat K = assemble_stiffness(tm, m.tensor(variant));
  Vec rhs = -assemble_load(tm, [&](Vec2 x) { return f.minus(x) + f.plus(x); }, {1.0, m.Ymeas});
  if (variant == MacroVariant::OscTheta)
    rhs += assemble_line_load(tm, tm.edges("interface"), [&](Vec2 x, std::size_t) { return m.theta_hat(x.y); });
  ConstraintSet c;
  c.add_dirichlet(tm, "dirichlet", 0.0);

  MacroSolution s;
  s.mesh = mesh;
  s.variant = variant;
  Vec u = solve_constrained(tm, K, rhs, c, opts, &s.stats);
  s.v0 = FemFunction(std::shared_ptr<const TriMesh>(mesh, &mesh->mesh), std::move(u));
  s.v0r = RecoveredField(s.v0);

  // Second-order one-sided differences along the grid rows.
  const Vec& v = s.v0.values();
  const int i0 = mesh->nx_minus;
  std::vector<double> tr(mesh->ny + 1), dp(mesh->ny + 1), dm(mesh->ny + 1);
  for (int j = 0; j <= mesh->ny; ++j) {
    auto at = [&](int i) { return v[mesh->grid_vertex(i, j)]; };
    tr[j] = at(i0);
    dp[j] = (-3.0 * at(i0) + 4.0 * at(i0 + 1) - at(i0 + 2)) / (2.0 * mesh->dx_plus());
    dm[j] = (3.0 * at(i0) - 4.0 * at(i0 - 1) + at(i0 - 2)) / (2.0 * mesh->dx_minus());
  }
  // The one-sided differences are second order where the averaged recovery is
  // first order, so they also seed the recovered gradients on the interface.
  for (int j = 0; j <= mesh->ny; ++j) {
    const int vtx = mesh->grid_vertex(i0, j);
    const double tangential = j == 0 || j == mesh->ny
                                  ? 0.0
                                  : (tr[j + 1] - tr[j - 1]) / (2.0 * mesh->dy());
    s.v0r.set_gradient(Region::Plus, vtx, {dp[j], tangential});
    s.v0r.set_gradient(Region::Minus, vtx, {dm[j], tangential});
  }
  s.trace = Spline1D(std::move(tr), 0.0, mesh->dy());
  s.dx1_plus = Spline1D(std::move(dp), 0.0, mesh->dy());
  s.dx1_minus = Spline1D(std::move(dm), 0.0, mesh->dy());
  return s;
}

V1Solution solve_v1_flat(const MacroModel& m, const MacroSolution& v0, std::shared_ptr<const MacroMesh> dup_mesh,
                         const SolveOptions& opts) {
  m.validate();
  if (!dup_mesh->duplicated) throw ModelError("v1 needs the macro mesh with a duplicated interface");
  const TriMesh& tm = dup_mesh->mesh;
  const SpMat K = assemble_stiffness(tm, m.tensor(MacroVariant::Flat));
  auto flux = [&](double x2) { return m.J11 * second_trace_x1(m, v0, x2) + m.J22 * v0.dx2x2(x2); };
  const Vec rhs = assemble_line_load(tm, tm.edges("interface"), [&](Vec2 x, std::size_t) { return flux(x.y); });

  ConstraintSet c;
  c.add_dirichlet(tm, "dirichlet", 0.0);
  std::vector<bool> fixed(tm.vertices.size(), false);
  for (const auto& [vtx, val] : c.dirichlet) fixed[vtx] = true;
  for (const auto& [a, b] : dup_mesh->split.pairs) {
    if (fixed[a] && fixed[b]) continue;
    // v1+ = v1- - q1 d1 v0+.
    const double jump = -m.q1 * v0.dx1_plus(tm.vertices[a].y);
    c.jumps.push_back({a, b, jump});
  }
  V1Solution out;
  out.mesh = dup_mesh;
  Vec u = solve_constrained(tm, K, rhs, c, opts);
  for (const auto& j : c.jumps) out.jump_defect = std::max(out.jump_defect, std::abs(u[j.b] - u[j.a] - j.value));
  out.v1 = FemFunction(std::shared_ptr<const TriMesh>(dup_mesh, &dup_mesh->mesh), std::move(u));
  return out;
}

namespace {

Spline1D tabulate(const ThetaFn& theta, const std::function<double(double)>& weight, double d, int n, int q) {
  if (n < 3 || q < 1) throw ConfigError("theta tabulation needs n >= 3 and at least one quadrature point");
  std::vector<double> w(q);
  for (int k = 0; k < q; ++k) w[k] = weight(static_cast<double>(k) / q) / q;
  std::vector<double> vals(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double x2 = d * j / n;
    double s = 0.0;
    for (int k = 0; k < q; ++k) s += w[k] * theta(x2, static_cast<double>(k) / q);
    vals[j] = s;
  }
  return Spline1D(std::move(vals), 0.0, d / n);
}

}  // namespace

Spline1D theta_hat(const ThetaFn& theta, const InterfaceCurve& curve, double d, int n, int quad_points) {
  return tabulate(theta, [&](double t) { return curve.arclength_density(t); }, d, n, quad_points);
}

Spline1D theta_mean(const ThetaFn& theta, double d, int n, int quad_points) {
  return tabulate(theta, [](double) { return 1.0; }, d, n, quad_points);
}

}  // namespace phom
