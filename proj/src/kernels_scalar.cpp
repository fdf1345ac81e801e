#include "treewave/kernels.hpp"

#include <cmath>

namespace treewave::kernels::scalar {

void cubic_g(const double* v, double* out, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] * (1.0 - v[i]) * (v[i] - a);
}

void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right) {
  if (n == 0) return;
  const double kp1 = k + 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double um = (i == 0) ? left : u[i - 1];
    const double up = (i + 1 == n) ? right : u[i + 1];
    const double ui = u[i];
    du[i] = d * (k * up - kp1 * ui + um) + ui * (1.0 - ui) * (ui - a);
  }
}

void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt) {
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a) {
  const double kp1 = k + 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = phi0[i];
    out[i] = -c * dphi[i] - d * (phi_m[i] - kp1 * p + k * phi_p[i]) -
             p * (1.0 - p) * (p - a);
  }
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace treewave::kernels::scalar
