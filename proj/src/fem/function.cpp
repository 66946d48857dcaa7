#include <algorithm>
#include <cmath>
#include <limits>

#include "phom/fem.hpp"

namespace phom {

std::array<double, 3> barycentric(const TriMesh& mesh, std::size_t t, Vec2 p) {
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  const double inv = 1.0 / cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) * inv;
  const double l2 = cross(b - a, p - a) * inv;
  return {1.0 - l1 - l2, l1, l2};
}

namespace {

double point_triangle_distance(const TriMesh& mesh, std::size_t t, Vec2 p) {
  const auto& tri = mesh.triangles[t];
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = mesh.vertices[tri[k]];
    const Vec2 e = mesh.vertices[tri[(k + 1) % 3]] - a;
    const double s = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
    best = std::min(best, norm(p - (a + e * s)));
  }
  return best;
}

}  // namespace

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  if (mesh.vertices.empty()) return;
  Vec2 lo = mesh.vertices[0];
  Vec2 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const double w = std::max(hi.x - lo.x, 1e-300);
  const double h = std::max(hi.y - lo.y, 1e-300);
  const double target = std::max<double>(1.0, static_cast<double>(mesh.triangles.size()) / 2.0);
  cell_ = std::sqrt(w * h / target);
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
  lo_ = lo;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (int v : mesh.triangles[t]) {
      x0 = std::min(x0, mesh.vertices[v].x);
      x1 = std::max(x1, mesh.vertices[v].x);
      y0 = std::min(y0, mesh.vertices[v].y);
      y1 = std::max(y1, mesh.vertices[v].y);
    }
    const int i0 = std::clamp(static_cast<int>((x0 - lo_.x) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((x1 - lo_.x) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((y0 - lo_.y) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((y1 - lo_.y) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
  }
}

long PointLocator::locate(Vec2 p, std::optional<Region> region, double tol) const {
  if (buckets_.empty()) return -1;
  const int ci = static_cast<int>(std::floor((p.x - lo_.x) / cell_));
  const int cj = static_cast<int>(std::floor((p.y - lo_.y) / cell_));
  long best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  auto scan = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
    for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
      if (region && mesh_->regions[t] != *region) continue;
      const auto l = barycentric(*mesh_, t, p);
      const double score = std::min({l[0], l[1], l[2]});
      if (score > best_score) {
        best_score = score;
        best = t;
      }
    }
  };
  scan(std::clamp(ci, 0, nx_ - 1), std::clamp(cj, 0, ny_ - 1));
  if (best >= 0 && best_score >= -1e-12) return best;
  // Near a bucket or domain edge: look at the neighbourhood by distance.
  const int reach = std::max(1, static_cast<int>(std::ceil(tol / cell_)));
  best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int j = cj - reach; j <= cj + reach; ++j)
    for (int i = ci - reach; i <= ci + reach; ++i) {
      if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
      for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
        if (region && mesh_->regions[t] != *region) continue;
        const auto l = barycentric(*mesh_, t, p);
        if (std::min({l[0], l[1], l[2]}) >= -1e-12) return t;
        const double d = point_triangle_distance(*mesh_, t, p);
        if (d < best_dist) {
          best_dist = d;
          best = t;
        }
      }
    }
  return best_dist <= tol ? best : -1;
}

FemFunction::FemFunction(std::shared_ptr<const TriMesh> mesh, Vec values, Vec2 period)
    : mesh_(std::move(mesh)), values_(std::move(values)), period_(period) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->vertices.size())
    throw EvaluationError("field size does not match the mesh");
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i])) throw EvaluationError("field has non-finite values");
  locator_ = std::make_shared<PointLocator>(*mesh_);
}

FemFunction::FemFunction(const FemFunction& same_mesh, Vec values)
    : mesh_(same_mesh.mesh_), locator_(same_mesh.locator_), values_(std::move(values)), period_(same_mesh.period_) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->vertices.size())
    throw EvaluationError("field size does not match the mesh");
}

Vec2 FemFunction::wrap(Vec2 p) const {
  if (period_.x > 0.0) p.x -= period_.x * std::floor(p.x / period_.x);
  if (period_.y > 0.0) p.y -= period_.y * std::floor(p.y / period_.y);
  return p;
}

long FemFunction::locate(Vec2 p, std::optional<Region> side) const {
  return locator_->locate(wrap(p), side);
}

Vec2 FemFunction::gradient(std::size_t t) const {
  const auto g = hat_gradients(*mesh_, t);
  const auto& tri = mesh_->triangles[t];
  return g[0] * values_[tri[0]] + g[1] * values_[tri[1]] + g[2] * values_[tri[2]];
}

ValGrad FemFunction::evaluate_in(std::size_t t, Vec2 p) const {
  const auto l = barycentric(*mesh_, t, p);
  const auto& tri = mesh_->triangles[t];
  return {l[0] * values_[tri[0]] + l[1] * values_[tri[1]] + l[2] * values_[tri[2]], gradient(t)};
}

ValGrad FemFunction::evaluate(Vec2 p, std::optional<Region> side) const { return evaluate_near(p, p, side); }

ValGrad FemFunction::evaluate_near(Vec2 p, Vec2 where, std::optional<Region> side) const {
  const Vec2 w = wrap(where);
  const long t = locator_->locate(w, side);
  if (t < 0)
    throw EvaluationError("point (" + std::to_string(where.x) + ", " + std::to_string(where.y) +
                          ") lies outside the mesh");
  // Shift p by the same lattice vector as `where`.
  return evaluate_in(static_cast<std::size_t>(t), p + (w - where));
}

double FemFunction::integral(std::optional<Region> region) const {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh_->triangles.size(); ++t) {
    if (region && mesh_->regions[t] != *region) continue;
    const auto& tri = mesh_->triangles[t];
    s += mesh_->area(t) * (values_[tri[0]] + values_[tri[1]] + values_[tri[2]]) / 3.0;
  }
  return s;
}

double FemFunction::max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace phom
