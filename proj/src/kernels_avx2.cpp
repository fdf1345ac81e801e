#include "treewave/kernels.hpp"

#if defined(TREEWAVE_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

// 4-wide AVX2/FMA variants. Tails and short arrays fall through to plain
// loops; the arithmetic per lane matches the scalar reference up to FMA
// rounding, which the equivalence tests bound.

namespace treewave::kernels::avx2 {

namespace {

// v*(1-v)*(v-a)
inline __m256d cubic(__m256d v, __m256d a, __m256d one) {
  const __m256d t = _mm256_mul_pd(v, _mm256_sub_pd(one, v));
  return _mm256_mul_pd(t, _mm256_sub_pd(v, a));
}

}  // namespace

void cubic_g(const double* v, double* out, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, cubic(_mm256_loadu_pd(v + i), va, one));
  for (; i < n; ++i) out[i] = v[i] * (1.0 - v[i]) * (v[i] - a);
}

void cubic_lattice_rhs(const double* u, double* du, std::size_t n,
                       double d, double k, double a,
                       double left, double right) {
  if (n == 0) return;
  const double kp1 = k + 1.0;
  auto edge = [&](std::size_t i) {
    const double um = (i == 0) ? left : u[i - 1];
    const double up = (i + 1 == n) ? right : u[i + 1];
    const double ui = u[i];
    du[i] = d * (k * up - kp1 * ui + um) + ui * (1.0 - ui) * (ui - a);
  };
  if (n < 6) {
    for (std::size_t i = 0; i < n; ++i) edge(i);
    return;
  }
  edge(0);
  const __m256d vd = _mm256_set1_pd(d);
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vkp1 = _mm256_set1_pd(kp1);
  const __m256d va = _mm256_set1_pd(a);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d um = _mm256_loadu_pd(u + i - 1);
    const __m256d ui = _mm256_loadu_pd(u + i);
    const __m256d up = _mm256_loadu_pd(u + i + 1);
    // k*up - (k+1)*ui + um
    __m256d lap = _mm256_fmadd_pd(vk, up, um);
    lap = _mm256_fnmadd_pd(vkp1, ui, lap);
    _mm256_storeu_pd(du + i, _mm256_fmadd_pd(vd, lap, cubic(ui, va, one)));
  }
  for (; i < n; ++i) edge(i);
}

void rk4_combine(const double* u, const double* k1, const double* k2,
                 const double* k3, const double* k4, double* out,
                 std::size_t n, double dt) {
  const double w = dt / 6.0;
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_loadu_pd(k1 + i);
    s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k2 + i), s);
    s = _mm256_fmadd_pd(two, _mm256_loadu_pd(k3 + i), s);
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vw, s, _mm256_loadu_pd(u + i)));
  }
  for (; i < n; ++i)
    out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void cubic_wave_residual(const double* phi_m, const double* phi0,
                         const double* phi_p, const double* dphi,
                         double* out, std::size_t n,
                         double c, double d, double k, double a) {
  const double kp1 = k + 1.0;
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vd = _mm256_set1_pd(d);
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vkp1 = _mm256_set1_pd(kp1);
  const __m256d va = _mm256_set1_pd(a);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(phi0 + i);
    __m256d lap = _mm256_fmadd_pd(vk, _mm256_loadu_pd(phi_p + i),
                                  _mm256_loadu_pd(phi_m + i));
    lap = _mm256_fnmadd_pd(vkp1, p, lap);
    __m256d r = _mm256_mul_pd(vc, _mm256_loadu_pd(dphi + i));
    r = _mm256_fmadd_pd(vd, lap, r);
    r = _mm256_add_pd(r, cubic(p, va, one));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_setzero_pd(), r));
  }
  for (; i < n; ++i) {
    const double p = phi0[i];
    out[i] = -c * dphi[i] - d * (phi_m[i] - kp1 * p + k * phi_p[i]) -
             p * (1.0 - p) * (p - a);
  }
}

double max_abs(const double* x, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vm = _mm256_max_pd(vm, _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = std::max(std::max(lanes[0], lanes[1]),
                      std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace treewave::kernels::avx2

#endif  // TREEWAVE_HAVE_AVX2
