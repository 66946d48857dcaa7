#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "phom/fem.hpp"
#include "phom/kernels.hpp"

namespace phom {

const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::Auto:
      return "auto";
    case SolverKind::Dense:
      return "dense";
    case SolverKind::SparseDirect:
      return "sparse-direct";
    case SolverKind::CG:
      return "cg";
  }
  return "?";
}

namespace {

// y = A x for a symmetric compressed matrix: the column-major arrays of a
// symmetric matrix are also its row-major arrays.
void sym_spmv(const SpMat& A, const Vec& x, Vec& y) {
  y.resize(A.rows());
  kernels::spmv(static_cast<std::size_t>(A.rows()), A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(), x.data(),
                y.data());
}

double vnorm(const Vec& v) { return std::sqrt(kernels::dot(v.data(), v.data(), static_cast<std::size_t>(v.size()))); }

double relative_residual(const SpMat& A, const Vec& x, const Vec& b) {
  Vec r;
  sym_spmv(A, x, r);
  r -= b;
  const double nb = vnorm(b);
  return nb > 0.0 ? vnorm(r) / nb : vnorm(r);
}

// Jacobi-preconditioned CG on y = op(x).
template <class Op>
int pcg(const Op& op, const Vec& diag, const Vec& b, Vec& x, double tol, int max_iter, double& rel) {
  const auto n = static_cast<std::size_t>(b.size());
  x.setZero(b.size());
  const double nb = vnorm(b);
  if (nb == 0.0) {
    rel = 0.0;
    return 0;
  }
  Vec r = b;
  Vec z(b.size());
  Vec p(b.size());
  Vec q(b.size());
  Vec inv = diag.cwiseInverse();
  kernels::hadamard(inv.data(), r.data(), z.data(), n);
  p = z;
  double rz = kernels::dot(r.data(), z.data(), n);
  for (int it = 1; it <= max_iter; ++it) {
    op(p, q);
    const double alpha = rz / kernels::dot(p.data(), q.data(), n);
    kernels::axpy(alpha, p.data(), x.data(), n);
    kernels::axpy(-alpha, q.data(), r.data(), n);
    rel = vnorm(r) / nb;
    if (rel <= tol) return it;
    kernels::hadamard(inv.data(), r.data(), z.data(), n);
    const double rz_new = kernels::dot(r.data(), z.data(), n);
    kernels::xpby(z.data(), rz_new / rz, p.data(), n);
    rz = rz_new;
  }
  std::ostringstream msg;
  msg << "conjugate gradient did not converge in " << max_iter << " iterations (relative residual " << rel << ")";
  throw SolverError(msg.str());
}

}  // namespace

Vec solve_constrained(const TriMesh& mesh, const SpMat& K, const Vec& f, const ConstraintSet& c,
                      const SolveOptions& opts, SolveStats* stats) {
  const auto nv = mesh.vertices.size();
  if (static_cast<std::size_t>(K.rows()) != nv || static_cast<std::size_t>(f.size()) != nv)
    throw SolverError("system size does not match the mesh");
  const DofMap map = resolve_constraints(nv, c);
  const int n = map.ndof;

  Vec g(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) g[v] = map.offset[v];
  Vec Kg = K * g;

  // Reduced system P^T K P x = P^T (f - K g).
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(K.nonZeros()));
  Vec rhs = Vec::Zero(n);
  for (int col = 0; col < K.outerSize(); ++col) {
    const int dc = map.dof[col];
    if (dc < 0) continue;
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      const int dr = map.dof[it.row()];
      if (dr >= 0) trip.emplace_back(dr, dc, it.value());
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (map.dof[v] >= 0) rhs[map.dof[v]] += f[v] - Kg[v];

  Vec b;
  double gauge_rhs = 0.0;
  if (c.zero_mean) {
    const Vec m = assemble_mass_lumped(mesh, c.mean_region);
    b = Vec::Zero(n);
    for (std::size_t v = 0; v < nv; ++v) {
      if (map.dof[v] >= 0) b[map.dof[v]] += m[v];
      gauge_rhs -= m[v] * g[v];
    }
  }

  const bool gauge = c.zero_mean;
  const int size = n + (gauge ? 1 : 0);
  SolverKind kind = opts.kind;
  if (kind == SolverKind::Auto)
    kind = size <= opts.dense_limit ? SolverKind::Dense
                                    : (size <= opts.direct_limit ? SolverKind::SparseDirect : SolverKind::CG);

  SpMat A(size, size);
  Vec rhs_full(size);
  {
    auto all = trip;
    if (gauge) {
      for (int i = 0; i < n; ++i)
        if (b[i] != 0.0) {
          all.emplace_back(i, n, b[i]);
          all.emplace_back(n, i, b[i]);
        }
    }
    A.setFromTriplets(all.begin(), all.end());
    rhs_full.head(n) = rhs;
    if (gauge) rhs_full[n] = gauge_rhs;
  }

  Vec x(size);
  int iterations = 0;
  if (n == 0) {
    x.setZero();
  } else if (kind == SolverKind::Dense) {
    Eigen::MatrixXd D(A);
    x = D.partialPivLu().solve(rhs_full);
  } else if (kind == SolverKind::SparseDirect) {
    if (gauge) {
      Eigen::SparseLU<SpMat> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
      x = lu.solve(rhs_full);
    } else {
      Eigen::SimplicialLDLT<SpMat> ldlt;
      ldlt.compute(A);
      if (ldlt.info() != Eigen::Success) throw SolverError("sparse LDLT factorization failed");
      x = ldlt.solve(rhs_full);
    }
  } else {
    const int cap = opts.cg_max_iter > 0 ? opts.cg_max_iter : static_cast<int>(20.0 * std::sqrt(double(n))) + 20;
    SpMat Kr(n, n);
    Kr.setFromTriplets(trip.begin(), trip.end());
    Vec diag = Kr.diagonal();
    Vec xr;
    double rel = 0.0;
    if (!gauge) {
      iterations = pcg([&](const Vec& p, Vec& q) { sym_spmv(Kr, p, q); }, diag, rhs, xr, opts.cg_tol, cap, rel);
      x.head(n) = xr;
    } else {
      // The reduced operator annihilates constants; remove the multiplier
      // explicitly and regularize with s b b^T, which is SPD and keeps the solution.
      const double lambda = rhs.sum() / b.sum();
      const double s = diag.mean() / std::max(b.squaredNorm() / n, 1e-300);
      Vec r2 = rhs - lambda * b + s * gauge_rhs * b;
      Vec d2 = diag + s * b.cwiseAbs2();
      iterations = pcg(
          [&](const Vec& p, Vec& q) {
            sym_spmv(Kr, p, q);
            q += (s * b.dot(p)) * b;
          },
          d2, r2, xr, opts.cg_tol, cap, rel);
      x.head(n) = xr;
      x[n] = lambda;
    }
  }

  const double res = relative_residual(A, x, rhs_full);
  if (!(res <= opts.residual_tol) && kind != SolverKind::CG) {
    std::ostringstream msg;
    msg << solver_name(kind) << " solve left relative residual " << res;
    throw SolverError(msg.str());
  }
  if (kind == SolverKind::CG && !(res <= std::max(opts.residual_tol, 10.0 * opts.cg_tol))) {
    std::ostringstream msg;
    msg << "cg solve left relative residual " << res;
    throw SolverError(msg.str());
  }
  if (stats) {
    stats->ndof = n;
    stats->gauge = gauge;
    stats->used = kind;
    stats->iterations = iterations;
    stats->residual = res;
  }

  Vec u(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) u[v] = map.offset[v] + (map.dof[v] >= 0 ? x[map.dof[v]] : 0.0);
  return u;
}

}  // namespace phom
