#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phom/mesh.hpp"

namespace phom {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Region-wise constant diagonal conductivity.
struct DiffusionTensor {
  std::array<double, 2> minus{1.0, 1.0};
  std::array<double, 2> plus{1.0, 1.0};

  static DiffusionTensor identity() { return {}; }
  static DiffusionTensor regionwise(double m11, double m22, double p11, double p22) {
    return {{m11, m22}, {p11, p22}};
  }
  const std::array<double, 2>& of(Region r) const { return r == Region::Minus ? minus : plus; }
  void validate() const;  // ModelError unless every entry is positive and finite
};

// Mid-edge points of triangle t; the 3-point rule with weights |T|/3 is exact for quadratics.
std::array<Vec2, 3> midedge_points(const TriMesh& mesh, std::size_t t);

// Constant gradients of the three hat functions of triangle t.
std::array<Vec2, 3> hat_gradients(const TriMesh& mesh, std::size_t t);

SpMat assemble_stiffness(const TriMesh& mesh, const DiffusionTensor& tensor);

// Lumped integrals of the hat functions over the triangles of one region (or all).
Vec assemble_mass_lumped(const TriMesh& mesh, std::optional<Region> region = {});

// b_i = int w f phi_i with region weights w.
Vec assemble_load(const TriMesh& mesh, const std::function<double(Vec2)>& f,
                  std::array<double, 2> region_weight = {1.0, 1.0});

// b_i = int (s phi_i + G . grad phi_i); the callback fills s and G at a
// quadrature point x of triangle t.
using SourceFn = std::function<void(std::size_t t, Vec2 x, double& s, Vec2& G)>;
Vec assemble_source(const TriMesh& mesh, const SourceFn& source);

// b_i = int_edges g phi_i dl, two Gauss points per edge. The callback gets the
// position and the index of the edge within the list.
using LineFn = std::function<double(Vec2 x, std::size_t edge)>;
Vec assemble_line_load(const TriMesh& mesh, const std::vector<Edge>& edges, const LineFn& g);

// Linear constraints on nodal values.
struct ConstraintSet {
  struct Jump {
    int a;
    int b;
    double value;  // u_b = u_a + value
  };
  std::vector<std::pair<int, double>> dirichlet;
  std::vector<PeriodicPairing> periodic;
  std::vector<Jump> jumps;
  bool zero_mean = false;
  std::optional<Region> mean_region;  // whole mesh when empty

  void add_dirichlet(const TriMesh& mesh, const std::string& tag, const std::function<double(Vec2)>& value);
  void add_dirichlet(const TriMesh& mesh, const std::string& tag, double value = 0.0);
};

// Vertex values u_v = x[dof[v]] + offset[v], or offset[v] alone when dof[v] < 0.
struct DofMap {
  std::vector<int> dof;
  std::vector<double> offset;
  int ndof = 0;
};

DofMap resolve_constraints(std::size_t num_vertices, const ConstraintSet& c);

enum class SolverKind { Auto, Dense, SparseDirect, CG };
const char* solver_name(SolverKind k);

struct SolveOptions {
  SolverKind kind = SolverKind::Auto;
  double cg_tol = 1e-10;
  int cg_max_iter = 0;  // 0: 20 sqrt(n)
  double residual_tol = 1e-9;
  int dense_limit = 2000;
  int direct_limit = 300000;
};

struct SolveStats {
  int ndof = 0;
  bool gauge = false;
  SolverKind used = SolverKind::Auto;
  int iterations = 0;
  double residual = 0.0;  // relative residual of the reduced system
};

// Solves K u = f under the constraints and returns all nodal values.
Vec solve_constrained(const TriMesh& mesh, const SpMat& K, const Vec& f, const ConstraintSet& c,
                      const SolveOptions& opts = {}, SolveStats* stats = nullptr);

// Bucket grid over triangle bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);
  // Triangle containing p (restricted to a region if given), or -1.
  // Points within tol of the closest admissible triangle are accepted.
  long locate(Vec2 p, std::optional<Region> region = {}, double tol = 1e-9) const;

 private:
  const TriMesh* mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// Barycentric coordinates of p in triangle t.
std::array<double, 3> barycentric(const TriMesh& mesh, std::size_t t, Vec2 p);

// P1 field on a mesh. Optional periods wrap evaluation points into
// [0, period) before location (zero: no wrap in that direction).
class FemFunction {
 public:
  FemFunction() = default;
  FemFunction(std::shared_ptr<const TriMesh> mesh, Vec values, Vec2 period = {});
  // Reuses the locator of another function on the same mesh.
  FemFunction(const FemFunction& same_mesh, Vec values);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  const Vec& values() const { return values_; }
  Vec2 period() const { return period_; }

  Vec2 wrap(Vec2 p) const;
  // Throws EvaluationError when p lies outside the (wrapped) domain.
  ValGrad evaluate(Vec2 p, std::optional<Region> side = {}) const;
  // Locates with `where`, evaluates the element polynomial at p.
  ValGrad evaluate_near(Vec2 p, Vec2 where, std::optional<Region> side = {}) const;
  ValGrad evaluate_in(std::size_t t, Vec2 p) const;
  Vec2 gradient(std::size_t t) const;
  long locate(Vec2 p, std::optional<Region> side = {}) const;

  double integral(std::optional<Region> region = {}) const;
  double max_abs() const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  std::shared_ptr<const PointLocator> locator_;
  Vec values_;
  Vec2 period_;
};

// Reference field for error norms: value and gradient at a quadrature point x of fine triangle t.
using ReferenceFn = std::function<ValGrad(std::size_t t, Vec2 x)>;

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;
  double l2_minus = 0.0;
  double l2_plus = 0.0;
  double h1_minus = 0.0;
  double h1_plus = 0.0;
  double interior_h1 = 0.0;        // |x1| >= band
  double interior_h1_minus = 0.0;  // x1 <= -band
  double interior_h1_plus = 0.0;   // x1 >= band
};

// Norms of u - reference with the 3-point mid-edge rule; h1 is the full H1 norm.
ErrorNorms error_norms(const FemFunction& u, const ReferenceFn& reference, double band = 0.2);

// "PH-FIELD 1" dump: mesh checksum and nodal values.
void write_field(std::ostream& os, const FemFunction& fn);
// x,y,value on a regular grid; points outside the domain are skipped.
void write_samples_csv(std::ostream& os, const FemFunction& fn, Vec2 lo, Vec2 hi, int nx, int ny,
                       std::optional<Region> side = {});

}  // namespace phom
