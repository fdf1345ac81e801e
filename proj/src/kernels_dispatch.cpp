#include "treewave/kernels.hpp"

#include <atomic>

namespace treewave::kernels {

bool avx2_available() {
#if defined(TREEWAVE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {
std::atomic<Backend> g_backend{avx2_available() ? Backend::Avx2
                                                : Backend::Scalar};
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
  g_backend.store(b, std::memory_order_relaxed);
}

#if defined(TREEWAVE_HAVE_AVX2)
#define TREEWAVE_DISPATCH(fn, ...)                    \
  if (active_backend() == Backend::Avx2)              \
    return avx2::fn(__VA_ARGS__);                     \
  return scalar::fn(__VA_ARGS__)
#else
#define TREEWAVE_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void cubic_g(const double* v, double* out, std::size_t n, double a) {
  TREEWAVE_DISPATCH(cubic_g, v, out, n, a);
}

void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right) {
  TREEWAVE_DISPATCH(cubic_lattice_rhs, u, du, n, d, k, a, left, right);
}

void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt) {
  TREEWAVE_DISPATCH(rk4_combine, u, k1, k2, k3, k4, out, n, dt);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  TREEWAVE_DISPATCH(axpy, alpha, x, y, n);
}

void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a) {
  TREEWAVE_DISPATCH(cubic_wave_residual, phi_m, phi0, phi_p, dphi, out, n, c,
                    d, k, a);
}

double max_abs(const double* x, std::size_t n) {
  TREEWAVE_DISPATCH(max_abs, x, n);
}

#undef TREEWAVE_DISPATCH

}  // namespace treewave::kernels
