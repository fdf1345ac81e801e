#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "treewave/nonlinearity.hpp"

namespace treewave {

// Discretized traveling-wave boundary-value problem: profile values on a
// uniform grid over [-L, L], fourth-order central first derivative, the
// unit-shift coupling resolved exactly on the grid (one grid unit = I0
// cells), clamped tails, and a midpoint phase condition that pins the
// translation invariance. The speed c is an unknown alongside the profile.

struct WaveGrid {
  double L = 20.0;  // half-width of the domain
  int i0 = 8;       // cells per unit shift, dx = 1/i0

  double dx() const { return 1.0 / i0; }
  int n() const;                             // segment count N = 2*L*i0
  double xi(int i) const { return -L + i * dx(); }

  // Throws std::invalid_argument unless L > 0, i0 >= 1, L*i0 integral and
  // the domain spans at least a few stencil widths.
  static WaveGrid make(double L, int i0);
};

struct WaveSolution {
  WaveGrid grid;  // grid actually solved on; finer than requested when the
                  // requested resolution cannot hold the front (see solve)
  double c = 0.0;
  std::vector<double> values;  // interior profile, indices 1..N-1
  double residual_norm = 0.0;
  int newton_iters = 0;
  bool converged = false;
  bool monotone = false;  // non-decreasing up to 1e-8 over the interior; the
                          // outer 10% belongs to the truncation check and is
                          // excluded. false flags a possibly spurious branch.

  // Clamped accessor over all integers: 0 left of the domain, 1 right.
  double value(int i) const;
};

// Residual of the discrete system, length N: rows 1..N-1 are
//   -c (8p_{i+1} - 8p_{i-1} - p_{i+2} + p_{i-2})/(12 dx)
//   - d (k p_{i+i0} - (k+1) p_i + p_{i-i0}) - g(p_i;a),
// row N is the phase condition p_{N/2} - 1/2; ghosts are clamped.
std::vector<double> residual(const System& s, const WaveGrid& grid, double c,
                             const std::vector<double>& values);

// Analytic Jacobian applied to a direction (dphi, dc); same row layout as
// residual. Used for finite-difference verification and by the solver.
std::vector<double> jacobian_apply(const System& s, const WaveGrid& grid,
                                   double c, const std::vector<double>& values,
                                   const std::vector<double>& dphi, double dc);

struct SolveOptions {
  int max_iters = 50;
  double tol = 1e-10;
  int max_halvings = 8;
};

// Traveling-front solve. With a caller-supplied guess (profile or speed)
// this is a single damped Newton run from that guess, suitable for
// continuation. Without one it runs a three-stage ladder:
//   - a standing-front solve on the integer lattice; pinned parameters
//     return c = 0 exactly. The translation family is discrete there, so
//     the phase condition is released and residual_norm covers the
//     differential rows only.
//   - damped Newton from the default guess (tanh front of width
//     max(1, 4 sqrt(d)), c from the continuum prediction clamped to
//     [-10,10]), accepted when it converges onto a monotone branch.
//   - time integration of the lattice until the front drifts, then a Newton
//     polish seeded with the reconstructed profile, refining i0 (up to x16,
//     truncating very large domains) until Newton agrees with the measured
//     speed. The result records the grid actually used.
// When all stages fail the ladder retries on the reflected system
// (a,d,k) -> (1-a, dk, 1/k), an exact symmetry of the discretization, and
// maps the solution back with c negated after re-verifying the residual.
// Non-convergence is reported through the flags, never thrown.
WaveSolution solve(const System& s, const WaveGrid& grid,
                   const std::vector<double>* initial_values = nullptr,
                   std::optional<double> initial_c = std::nullopt,
                   const SolveOptions& opts = {});

// solve, retried with a doubled domain (up to max_doublings) whenever the
// profile tails deviate from the clamps by more than 1e-6 over the outer
// 10% of the domain, or the solve fails to converge.
WaveSolution solve_adaptive(const System& s, WaveGrid grid,
                            int max_doublings = 3,
                            const SolveOptions& opts = {});

struct SpeedMap {
  std::vector<double> a_values;
  std::vector<double> d_values;
  // Row-major [d_index * a_count + a_index].
  std::vector<double> c;
  std::vector<std::uint8_t> converged;
  std::vector<std::uint8_t> pinned;
};

// Continuation sweep: along each fixed-d row the previous converged
// solution seeds the next a. Rows are independent and run on n_threads.
// Detected pinning plateaus are flagged and their speeds zeroed.
SpeedMap sweep(const System& system_template,
               const std::vector<double>& a_values,
               const std::vector<double>& d_values, const WaveGrid& grid,
               int n_threads = 1);

struct PinnedInterval {
  int i_lo = 0, i_hi = 0;
  double a_lo = 0.0, a_hi = 0.0;
};

// Plateau detector on a speed curve sampled over a monotone a-grid: a run
// of |c| < 1e-5 entered and left through a drop of at least 3 decades in
// log10|c| (curve ends count as qualified boundaries). Returns the longest
// qualifying run.
std::optional<PinnedInterval> detect_pinning(const std::vector<double>& a_grid,
                                             const std::vector<double>& c);

}  // namespace treewave
