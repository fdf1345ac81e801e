#pragma once
#include <cstddef>

// Hot inner loops shared by the time integrators, the wave solver, and the
// certificate grids: cubic reaction terms, lattice stencils, RK4 stage
// combines, and max-abs reductions. Every operation has a scalar reference
// implementation and (on x86) an AVX2 variant; the dispatcher picks one at
// startup. Custom (non-cubic) nonlinearities never reach these kernels; they
// carry user callbacks and stay on plain loops.

namespace treewave::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_available();
Backend active_backend();
// Test hook. Requesting Avx2 on a machine without it keeps Scalar.
void set_backend(Backend b);

// out[i] = v[i]*(1 - v[i])*(v[i] - a)
void cubic_g(const double* v, double* out, std::size_t n, double a);

// du[i] = d*(k*u[i+1] - (k+1)*u[i] + u[i-1]) + g(u[i]; a), with the
// out-of-range neighbours u[-1] and u[n] replaced by left/right.
void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right);

// out[i] = u[i] + (dt/6)*(k1[i] + 2*k2[i] + 2*k3[i] + k4[i])
void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt);

// y[i] += alpha*x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// out[i] = -c*dphi[i] - d*(phi_m[i] - (k+1)*phi0[i] + k*phi_p[i])
//          - g(phi0[i]; a)
void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a);

double max_abs(const double* x, std::size_t n);

// Reference implementations, kept callable for equivalence tests.
namespace scalar {
void cubic_g(const double* v, double* out, std::size_t n, double a);
void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right);
void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a);
double max_abs(const double* x, std::size_t n);
}  // namespace scalar

#if defined(TREEWAVE_HAVE_AVX2)
namespace avx2 {
void cubic_g(const double* v, double* out, std::size_t n, double a);
void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right);
void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a);
double max_abs(const double* x, std::size_t n);
}  // namespace avx2
#endif

}  // namespace treewave::kernels
