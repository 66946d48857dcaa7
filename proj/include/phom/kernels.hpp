#pragma once

// Dense/sparse vector kernels used by the iterative solver and residual checks.
// Every kernel has a portable scalar reference and, on x86-64 hosts with
// AVX2+FMA, a vectorized variant chosen once at startup. Setting the
// environment variable PHOM_SIMD=scalar forces the reference path.

#include <cstddef>
#include <cstdint>

namespace phom::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  void (*spmv)(std::size_t rows, const int* row_ptr, const int* cols, const double* vals,
               const double* x, double* y);
};

const KernelTable& scalar_table();
// Null when the vectorized translation unit was not built for this target.
const KernelTable* avx2_table();

bool cpu_has_avx2();

Backend active_backend();
void set_backend(Backend b);  // throws std::runtime_error if unavailable
const char* backend_name(Backend b);

const KernelTable& table();

inline double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { table().axpy(alpha, x, y, n); }
inline void xpby(const double* x, double beta, double* y, std::size_t n) { table().xpby(x, beta, y, n); }
inline void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  table().hadamard(a, b, out, n);
}
inline void spmv(std::size_t rows, const int* row_ptr, const int* cols, const double* vals, const double* x,
                 double* y) {
  table().spmv(rows, row_ptr, cols, vals, x, y);
}

}  // namespace phom::kernels
