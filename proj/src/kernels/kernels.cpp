#include "phom/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace phom::kernels {
namespace {

Backend pick_initial() {
  if (const char* env = std::getenv("PHOM_SIMD")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return (avx2_table() != nullptr && cpu_has_avx2()) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{pick_initial()};
  return b;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && (avx2_table() == nullptr || !cpu_has_avx2()))
    throw std::runtime_error("AVX2 kernels are not available on this host");
  current().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

const KernelTable& table() {
  return active_backend() == Backend::Avx2 ? *avx2_table() : scalar_table();
}

}  // namespace phom::kernels
