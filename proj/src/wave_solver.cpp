#include "treewave/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include "treewave/banded.hpp"
#include "treewave/dynamics.hpp"
#include "treewave/regions.hpp"

namespace treewave {

int WaveGrid::n() const { return static_cast<int>(std::lround(2.0 * L * i0)); }

WaveGrid WaveGrid::make(double L, int i0) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be > 0");
  if (i0 < 1) throw std::invalid_argument("i0 must be a positive integer");
  double prod = L * i0;
  if (std::abs(prod - std::lround(prod)) > 1e-9)
    throw std::invalid_argument("L*i0 must be integral so grid points hit "
                                "the unit shifts");
  WaveGrid g{L, i0};
  if (g.n() < 2 * std::max(i0, 2) + 2)
    throw std::invalid_argument("domain too small for the coupling stencil");
  return g;
}

double WaveSolution::value(int i) const {
  if (i <= 0) return 0.0;
  if (i >= grid.n()) return 1.0;
  return values[i - 1];
}

namespace {

inline double clamped(const std::vector<double>& v, int i, int N) {
  if (i <= 0) return 0.0;
  if (i >= N) return 1.0;
  return v[i - 1];
}

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> residual(const System& s, const WaveGrid& grid, double c,
                             const std::vector<double>& values) {
  const int N = grid.n();
  if (static_cast<int>(values.size()) != N - 1)
    throw std::invalid_argument("values length must be N-1");
  std::vector<double> F(N);
  const double inv12 = 1.0 / (12.0 * grid.dx());
  for (int i = 1; i <= N - 1; ++i) {
    double p0 = values[i - 1];
    double dphi = (8.0 * clamped(values, i + 1, N) -
                   8.0 * clamped(values, i - 1, N) -
                   clamped(values, i + 2, N) + clamped(values, i - 2, N)) *
                  inv12;
    double lap = s.k * clamped(values, i + grid.i0, N) - (s.k + 1.0) * p0 +
                 clamped(values, i - grid.i0, N);
    F[i - 1] = -c * dphi - s.d * lap - s.g(p0);
  }
  F[N - 1] = values[N / 2 - 1] - 0.5;
  return F;
}

std::vector<double> jacobian_apply(const System& s, const WaveGrid& grid,
                                   double c, const std::vector<double>& values,
                                   const std::vector<double>& dphi,
                                   double dc) {
  const int N = grid.n();
  if (static_cast<int>(values.size()) != N - 1 || dphi.size() != values.size())
    throw std::invalid_argument("direction length must be N-1");
  auto dval = [&](int i) {
    return (i >= 1 && i <= N - 1) ? dphi[i - 1] : 0.0;  // clamps are constant
  };
  std::vector<double> out(N);
  const double inv12 = 1.0 / (12.0 * grid.dx());
  for (int i = 1; i <= N - 1; ++i) {
    double spatial = (8.0 * clamped(values, i + 1, N) -
                      8.0 * clamped(values, i - 1, N) -
                      clamped(values, i + 2, N) + clamped(values, i - 2, N)) *
                     inv12;
    double dspatial = (8.0 * dval(i + 1) - 8.0 * dval(i - 1) - dval(i + 2) +
                       dval(i - 2)) *
                      inv12;
    double dlap = s.k * dval(i + grid.i0) - (s.k + 1.0) * dval(i) +
                  dval(i - grid.i0);
    out[i - 1] = -c * dspatial - dc * spatial - s.d * dlap -
                 s.gv(values[i - 1]) * dval(i);
  }
  out[N - 1] = dphi[N / 2 - 1];
  return out;
}

namespace {

// Fills the profile block (banded) and the c column of the linearization.
void fill_linearization(const System& s, const WaveGrid& grid, double c,
                        const std::vector<double>& values, BandMatrix& B,
                        std::vector<double>& ccol) {
  const int N = grid.n();
  const double inv12 = 1.0 / (12.0 * grid.dx());
  const double ca = c * inv12;
  B.clear();
  for (int i = 1; i <= N - 1; ++i) {
    int r = i - 1;
    B.at(r, r) = s.d * (s.k + 1.0) - s.gv(values[r]);
    if (i + 1 <= N - 1) B.at(r, i) += -8.0 * ca;
    if (i - 1 >= 1) B.at(r, i - 2) += 8.0 * ca;
    if (i + 2 <= N - 1) B.at(r, i + 1) += ca;
    if (i - 2 >= 1) B.at(r, i - 3) += -ca;
    if (i + grid.i0 <= N - 1) B.at(r, i + grid.i0 - 1) += -s.d * s.k;
    if (i - grid.i0 >= 1) B.at(r, i - grid.i0 - 1) += -s.d;
    ccol[r] = -(8.0 * clamped(values, i + 1, N) -
                8.0 * clamped(values, i - 1, N) -
                clamped(values, i + 2, N) + clamped(values, i - 2, N)) *
              inv12;
  }
}

std::vector<double> default_guess(const System& s, const WaveGrid& grid) {
  const int N = grid.n();
  double w = std::max(1.0, 4.0 * std::sqrt(s.d));
  std::vector<double> phi(N - 1);
  for (int i = 1; i <= N - 1; ++i)
    phi[i - 1] = 0.5 * (1.0 + std::tanh(grid.xi(i) / w));
  return phi;
}

// Worst consecutive difference over the interior. The outer 10% belongs to
// the truncation check in solve_adaptive; the clamped tails carry genuine
// sub-1e-6 ripples there that say nothing about the branch.
double interior_min_diff(const WaveGrid& grid, const std::vector<double>& v) {
  const int N = grid.n();
  const int edge = std::max(1, N / 10);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = edge + 1; i <= N - 1 - edge; ++i)
    worst = std::min(worst, v[i - 1] - v[i - 2]);
  return worst;
}

WaveSolution newton_core(const System& s, const WaveGrid& grid,
                         std::vector<double> phi, double c,
                         const SolveOptions& opts) {
  const int N = grid.n();
  const int n = N - 1;
  const int mid = N / 2 - 1;
  const int halfband = std::max(grid.i0, 2);

  WaveSolution best;
  best.grid = grid;
  best.c = c;
  best.values = phi;
  best.residual_norm = inf_norm(residual(s, grid, c, phi));

  BandMatrix B(n, halfband, halfband);
  std::vector<double> ccol(n), rhs(2 * n), F;
  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    F = residual(s, grid, c, phi);
    double norm = inf_norm(F);
    if (norm <= best.residual_norm) {
      best.c = c;
      best.values = phi;
      best.residual_norm = norm;
    }
    if (norm < opts.tol) {
      converged = true;
      break;
    }

    fill_linearization(s, grid, c, phi, B, ccol);
    for (int j = 0; j < n; ++j) {
      rhs[j] = -F[j];      // u column
      rhs[n + j] = ccol[j];  // w column
    }
    B.solve(rhs, 2);
    double den = rhs[n + mid];
    if (std::abs(den) < 1e-300) break;  // bordering degenerate, give up
    double dc = (rhs[mid] + F[n]) / den;

    double lambda = 1.0;
    std::vector<double> trial(n);
    for (int halve = 0; halve <= opts.max_halvings; ++halve) {
      for (int j = 0; j < n; ++j)
        trial[j] = phi[j] + lambda * (rhs[j] - dc * rhs[n + j]);
      double tc = c + lambda * dc;
      double tnorm = inf_norm(residual(s, grid, tc, trial));
      if (tnorm < norm || halve == opts.max_halvings) {
        phi = trial;
        c = tc;
        break;
      }
      lambda *= 0.5;
    }
  }

  WaveSolution out;
  out.grid = grid;
  out.newton_iters = iter;
  if (converged) {
    out.c = c;
    out.values = phi;
    out.residual_norm = inf_norm(residual(s, grid, c, phi));
    out.converged = true;
  } else {
    out = best;  // carries residual_norm of the best iterate
    out.newton_iters = iter;
    out.converged = false;
  }
  out.monotone = interior_min_diff(grid, out.values) >= -1e-8;
  return out;
}

// Standing front on the integer lattice, Newton on sites -m..m with the
// clamps outside. A converged monotone profile embeds into the grid as an
// exact c = 0 solution: every grid point sits an integer shift away from a
// lattice site, so each differential row reduces to a lattice residual. The
// translation family is discrete here, hence no phase row; residual_norm
// reports the differential rows only.
std::optional<WaveSolution> standing_solve(const System& s,
                                           const WaveGrid& grid,
                                           const SolveOptions& opts) {
  const int m = static_cast<int>(std::ceil(grid.L)) + 2;
  const int nl = 2 * m + 1;
  std::vector<double> u(nl);

  auto lattice_residual = [&](const std::vector<double>& v) {
    std::vector<double> F(nl);
    for (int j = 0; j < nl; ++j) {
      double um = j == 0 ? 0.0 : v[j - 1];
      double up = j == nl - 1 ? 1.0 : v[j + 1];
      F[j] = s.d * (s.k * up - (s.k + 1.0) * v[j] + um) + s.g(v[j]);
    }
    return F;
  };

  BandMatrix B(nl, 1, 1);
  // Two guess registrations: the jump between sites finds the attracting
  // front family, a middle site at the unstable zero finds the saddle
  // family. Prefer the attracting one; it is the state the flow selects.
  bool ok = false;
  int iters = 0;
  for (int bond = 1; bond >= 0 && !ok; --bond) {
    for (int j = 0; j < nl; ++j)
      u[j] = bond ? (j <= m ? 0.0 : 1.0) : (j < m ? 0.0 : j > m ? 1.0 : s.a);
    bool diverged = false;
    for (iters = 0; iters < 60; ++iters) {
      std::vector<double> F = lattice_residual(u);
      if (inf_norm(F) < 1e-13) {
        ok = true;
        break;
      }
      B.clear();
      for (int j = 0; j < nl; ++j) {
        B.at(j, j) = s.d * (s.k + 1.0) - s.gv(u[j]);
        if (j > 0) B.at(j, j - 1) = -s.d;
        if (j < nl - 1) B.at(j, j + 1) = -s.d * s.k;
      }
      try {
        B.solve(F, 1);
      } catch (const std::runtime_error&) {
        diverged = true;
        break;
      }
      for (int j = 0; j < nl; ++j) u[j] += F[j];
      if (inf_norm(u) > 1e6) {
        diverged = true;
        break;
      }
    }
    if (diverged) ok = false;
    if (ok) {
      for (int j = 0; j < nl && ok; ++j) {
        if (u[j] < -1e-9 || u[j] > 1.0 + 1e-9) ok = false;
        if (j > 0 && u[j] < u[j - 1] - 1e-9) ok = false;
      }
    }
  }
  if (!ok) return std::nullopt;

  const int N = grid.n();
  std::vector<double> phi(N - 1);
  for (int i = 1; i <= N - 1; ++i) {
    int site = static_cast<int>(std::floor(grid.xi(i) + 0.5));
    phi[i - 1] = u[std::clamp(site + m, 0, nl - 1)];
  }
  std::vector<double> F = residual(s, grid, 0.0, phi);
  double rows = 0.0;
  for (int j = 0; j + 1 < static_cast<int>(F.size()); ++j)
    rows = std::max(rows, std::abs(F[j]));
  if (rows >= opts.tol) return std::nullopt;

  WaveSolution w;
  w.grid = grid;
  w.c = 0.0;
  w.values = std::move(phi);
  w.residual_norm = rows;
  w.newton_iters = iters;
  w.converged = true;
  w.monotone = true;
  return w;
}

struct FrontCurve {
  double c = 0.0;
  std::vector<std::pair<double, double>> pts;  // (xi, value), xi ascending
};

// Release a step front on a wide site window and integrate until it drifts.
// The second-half secant of the tracked crossing gives the speed (per-chunk
// rates lie during stick-slip dwells), then a second pass collects co-moving
// samples (site - pos - c t, u), bin-averages them, and an isotonic sweep
// strips the sampling noise; the profile itself is monotone.
std::optional<FrontCurve> march_front(const System& s) {
  const int M = 90;
  LatticeState state = LatticeState::step_front(-M, M);
  const DiffusionSchedule sched = DiffusionSchedule::constant(s.d);
  const double dt = stability_limit(s, sched, 0.0, 1.0);

  std::vector<double> ts, ps;
  auto track = [&](const LatticeState& st, double t) {
    auto p = front_position(st);
    if (p) {
      ts.push_back(t);
      ps.push_back(*p);
    }
    return p.has_value();
  };
  if (!track(state, 0.0)) return std::nullopt;
  double t = 0.0;
  while (t < 6000.0) {
    state = integrate(s, sched, std::move(state), t, t + 50.0, dt);
    t += 50.0;
    if (!track(state, t)) return std::nullopt;
    if (std::abs(ps.back() - ps.front()) > 15.0 && t >= 400.0) break;
    if (std::abs(ps.back()) > M - 12.0) break;  // window budget spent
  }
  size_t h = ts.size() / 2;
  if (ts.back() - ts[h] < 1.0) return std::nullopt;
  double c0 = (ps.back() - ps[h]) / (ts.back() - ts[h]);
  if (std::abs(c0) < 1e-7) return std::nullopt;  // effectively standing

  double span = std::min(5.0 / std::abs(c0), 2500.0);
  long keep_every = std::max(1L, std::lround(span / dt) / 1200);
  struct Snap {
    double t, pos;
    std::vector<double> u;
  };
  std::vector<Snap> snaps;
  long calls = 0;
  LatticeObserver obs = [&](double tt, const LatticeState& st) {
    if (calls++ % keep_every != 0) return;
    auto p = front_position(st);
    if (p) snaps.push_back({tt, *p, st.u});
  };
  integrate(s, sched, std::move(state), t, t + span, dt, obs);
  if (snaps.size() < 2) return std::nullopt;
  const double t1 = snaps.front().t, p1 = snaps.front().pos;
  double dts = snaps.back().t - t1;
  double c = dts > 1e-9 ? (snaps.back().pos - p1) / dts : c0;
  if (std::abs(c) < 1e-7) return std::nullopt;

  const double bw = 0.005, x0 = -220.0;
  const int nb = static_cast<int>(std::lround(440.0 / bw)) + 1;
  std::vector<double> sum(nb, 0.0);
  std::vector<int> cnt(nb, 0);
  for (const Snap& sn : snaps) {
    for (int j = 0; j < static_cast<int>(sn.u.size()); ++j) {
      double xi = (j - M) - p1 - c * (sn.t - t1);
      int b = static_cast<int>(std::lround((xi - x0) / bw));
      if (b < 0 || b >= nb) continue;
      sum[b] += sn.u[j];
      cnt[b] += 1;
    }
  }
  FrontCurve out;
  out.c = c;
  double lead = 0.0;
  for (int b = 0; b < nb; ++b) {
    if (!cnt[b]) continue;
    lead = std::max(lead, sum[b] / cnt[b]);
    out.pts.emplace_back(x0 + b * bw, lead);
  }
  if (out.pts.size() < 10) return std::nullopt;
  return out;
}

std::vector<double> seed_from_curve(const WaveGrid& grid,
                                    const FrontCurve& curve) {
  const int N = grid.n();
  const auto& q = curve.pts;
  std::vector<double> phi(N - 1);
  for (int i = 1; i <= N - 1; ++i) {
    double xi = grid.xi(i);
    double v;
    if (xi <= q.front().first) {
      v = q.front().second;
    } else if (xi >= q.back().first) {
      v = q.back().second;
    } else {
      auto it = std::upper_bound(q.begin(), q.end(), xi,
                                 [](double x, const std::pair<double, double>& p) {
                                   return x < p.first;
                                 });
      auto lo = std::prev(it);
      double w = (xi - lo->first) / (it->first - lo->first);
      v = lo->second + w * (it->second - lo->second);
    }
    phi[i - 1] = std::clamp(v, 0.0, 1.0);
  }
  return phi;
}

// Square profile Newton with the speed frozen at the measured value. Tames
// reconstructed seeds before the bordered iteration: without the phase row
// the step never chases the speed, so the iterate stays near the seed. Best
// effort; the bordered run after it is what gets judged.
void fixed_c_steps(const System& s, const WaveGrid& grid, double c,
                   std::vector<double>& phi, int max_iters, double tol) {
  const int n = grid.n() - 1;
  const int halfband = std::max(grid.i0, 2);
  BandMatrix B(n, halfband, halfband);
  std::vector<double> ccol(n), rhs(n), trial(n);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> F = residual(s, grid, c, phi);
    double nrm = 0.0;
    for (int j = 0; j < n; ++j) nrm = std::max(nrm, std::abs(F[j]));
    if (nrm < tol) return;
    fill_linearization(s, grid, c, phi, B, ccol);
    for (int j = 0; j < n; ++j) rhs[j] = -F[j];
    try {
      B.solve(rhs, 1);
    } catch (const std::runtime_error&) {
      return;
    }
    double lambda = 1.0;
    for (int halve = 0; halve <= 8; ++halve) {
      for (int j = 0; j < n; ++j) trial[j] = phi[j] + lambda * rhs[j];
      std::vector<double> Ft = residual(s, grid, c, trial);
      double tn = 0.0;
      for (int j = 0; j < n; ++j) tn = std::max(tn, std::abs(Ft[j]));
      if (tn < nrm || halve == 8) {
        phi = trial;
        break;
      }
      lambda *= 0.5;
    }
  }
}

// When the requested resolution cannot hold the front (near depinning the
// converged branch deforms smoothly away from the true one, so residuals
// alone cannot tell), polish the reconstructed profile on progressively
// finer grids until Newton agrees with the measured speed.
std::optional<WaveSolution> marched_solve(const System& s,
                                          const WaveGrid& grid,
                                          const SolveOptions& opts) {
  auto curve = march_front(s);
  if (!curve) return std::nullopt;
  for (int f : {1, 2, 4, 8, 16}) {
    long i0f = static_cast<long>(grid.i0) * f;
    if (f > 1 && i0f > 128) break;
    WaveGrid gf = grid;
    if (f > 1) {
      double Lf = grid.L;
      if (2.0 * Lf * static_cast<double>(i0f) > 6400.0)
        Lf = std::max(10.0, std::floor(3200.0 / static_cast<double>(i0f)));
      gf = WaveGrid::make(Lf, static_cast<int>(i0f));
    }
    std::vector<double> seed = seed_from_curve(gf, *curve);
    fixed_c_steps(s, gf, curve->c, seed, 40, 1e-6);
    WaveSolution w = newton_core(s, gf, std::move(seed), curve->c, opts);
    if (w.converged &&
        std::abs(w.c - curve->c) <= std::max(0.15 * std::abs(curve->c), 5e-4) &&
        interior_min_diff(gf, w.values) >= -5e-3)
      return w;
  }
  return std::nullopt;
}

// (a,d,k) -> (1-a, dk, 1/k) is an exact symmetry of the discretization:
// flipping the profile (phi -> 1 - phi(-xi)) negates every differential row
// and maps the phase row onto itself, so a solution of the reflected system
// maps back verbatim with c -> -c. Used as a fallback when the direct
// Newton basins misbehave; the mapped residual is re-verified here.
std::optional<WaveSolution> reflected_of(const System& s, const WaveSolution& rw,
                                         const SolveOptions& opts) {
  if (!(rw.converged && rw.monotone)) return std::nullopt;
  const int N = rw.grid.n();
  WaveSolution w;
  w.grid = rw.grid;
  w.c = -rw.c;
  w.values.resize(N - 1);
  for (int i = 1; i <= N - 1; ++i)
    w.values[i - 1] = 1.0 - rw.values[N - i - 1];
  std::vector<double> F = residual(s, rw.grid, w.c, w.values);
  double rows = 0.0;
  for (int j = 0; j + 1 < static_cast<int>(F.size()); ++j)
    rows = std::max(rows, std::abs(F[j]));
  // Standing solutions carry a released phase row; everything else must
  // satisfy the full system.
  double check = rw.c == 0.0 ? rows : std::max(rows, std::abs(F[N - 1]));
  if (check >= opts.tol) return std::nullopt;
  w.residual_norm = check;
  w.newton_iters = rw.newton_iters;
  w.converged = true;
  w.monotone = interior_min_diff(rw.grid, w.values) >= -1e-8;
  return w;
}

WaveSolution ladder_solve(const System& s, const WaveGrid& grid,
                          const SolveOptions& opts, bool allow_reflection) {
  // Pinned parameters carry an exact standing front, so take it when it
  // verifies on this grid; otherwise Newton from the default front, and as
  // a last resort a seed reconstructed from the time-dependent problem on a
  // refined grid.
  if (auto standing = standing_solve(s, grid, opts)) return *standing;

  const double c_default =
      std::clamp(asymptotic_speed(s.a, s.d, s.k), -10.0, 10.0);
  WaveSolution base =
      newton_core(s, grid, default_guess(s, grid), c_default, opts);
  if (base.converged && base.monotone) return base;

  if (auto marched = marched_solve(s, grid, opts)) return *marched;

  if (allow_reflection) {
    WaveSolution rw = ladder_solve(reflect(s), grid, opts, false);
    if (auto mapped = reflected_of(s, rw, opts)) return *mapped;
  }
  return base;
}

}  // namespace

WaveSolution solve(const System& s, const WaveGrid& grid,
                   const std::vector<double>* initial_values,
                   std::optional<double> initial_c, const SolveOptions& opts) {
  s.validate();

  if (initial_values || initial_c) {
    std::vector<double> phi =
        initial_values ? *initial_values : default_guess(s, grid);
    if (static_cast<int>(phi.size()) != grid.n() - 1)
      throw std::invalid_argument("initial guess length must be N-1");
    double c_default =
        std::clamp(asymptotic_speed(s.a, s.d, s.k), -10.0, 10.0);
    return newton_core(s, grid, std::move(phi), initial_c.value_or(c_default),
                       opts);
  }

  return ladder_solve(s, grid, opts, true);
}

WaveSolution solve_adaptive(const System& s, WaveGrid grid, int max_doublings,
                            const SolveOptions& opts) {
  for (int attempt = 0;; ++attempt) {
    WaveSolution w = solve(s, grid, nullptr, std::nullopt, opts);
    bool tails_ok = false;
    if (w.converged) {
      tails_ok = true;
      const int N = w.grid.n();
      const int edge = std::max(1, N / 10);
      for (int i = 1; i <= edge && tails_ok; ++i)
        tails_ok = std::abs(w.value(i)) <= 1e-6;
      for (int i = N - edge; i <= N - 1 && tails_ok; ++i)
        tails_ok = std::abs(w.value(i) - 1.0) <= 1e-6;
    }
    if ((w.converged && tails_ok) || attempt == max_doublings) return w;
    grid = WaveGrid::make(grid.L * 2.0, grid.i0);
  }
}

SpeedMap sweep(const System& system_template,
               const std::vector<double>& a_values,
               const std::vector<double>& d_values, const WaveGrid& grid,
               int n_threads) {
  const int na = static_cast<int>(a_values.size());
  const int nd = static_cast<int>(d_values.size());
  SpeedMap map;
  map.a_values = a_values;
  map.d_values = d_values;
  map.c.assign(static_cast<size_t>(na) * nd, 0.0);
  map.converged.assign(static_cast<size_t>(na) * nd, 0);
  map.pinned.assign(static_cast<size_t>(na) * nd, 0);

  auto run_row = [&](int di) {
    System s = system_template;
    s.d = d_values[di];
    std::vector<double> prev;
    double prev_c = 0.0;
    bool have_prev = false;
    for (int ai = 0; ai < na; ++ai) {
      s.a = a_values[ai];
      WaveSolution w = have_prev ? solve(s, grid, &prev, prev_c)
                                 : solve(s, grid);
      // Continuation can land on a spurious branch; retry with the full
      // guess-free ladder before accepting anything non-monotone.
      if (have_prev && !(w.converged && w.monotone)) w = solve(s, grid);
      size_t idx = static_cast<size_t>(di) * na + ai;
      map.c[idx] = w.c;
      map.converged[idx] = w.converged ? 1 : 0;
      // Seed the next cell only from a clean branch on the sweep grid; a
      // standing staircase (c exactly 0) degenerates the bordered system.
      if (w.converged && w.monotone && w.c != 0.0 &&
          w.grid.L == grid.L && w.grid.i0 == grid.i0) {
        prev = w.values;
        prev_c = w.c;
        have_prev = true;
      } else {
        have_prev = false;
      }
    }
    std::vector<double> row(map.c.begin() + static_cast<size_t>(di) * na,
                            map.c.begin() + static_cast<size_t>(di) * na + na);
    if (auto p = detect_pinning(a_values, row)) {
      for (int ai = p->i_lo; ai <= p->i_hi; ++ai) {
        size_t idx = static_cast<size_t>(di) * na + ai;
        map.pinned[idx] = 1;
        map.c[idx] = 0.0;
      }
    }
  };

  int workers = std::max(1, std::min(n_threads, nd));
  if (workers == 1) {
    for (int di = 0; di < nd; ++di) run_row(di);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (int di = t; di < nd; di += workers) run_row(di);
      });
    for (auto& th : pool) th.join();
  }
  return map;
}

std::optional<PinnedInterval> detect_pinning(const std::vector<double>& a_grid,
                                             const std::vector<double>& c) {
  if (a_grid.size() != c.size())
    throw std::invalid_argument("detect_pinning: grid/speed size mismatch");
  const int n = static_cast<int>(c.size());
  auto lg = [](double x) {
    return std::log10(std::max(std::abs(x), 1e-300));
  };
  std::optional<PinnedInterval> found;
  int best_len = 0;
  int i = 0;
  while (i < n) {
    if (std::abs(c[i]) >= 1e-5) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && std::abs(c[j + 1]) < 1e-5) ++j;
    bool left_ok = i == 0 || lg(c[i - 1]) - lg(c[i]) >= 3.0;
    bool right_ok = j == n - 1 || lg(c[j + 1]) - lg(c[j]) >= 3.0;
    if (left_ok && right_ok && j - i + 1 > best_len) {
      best_len = j - i + 1;
      found = PinnedInterval{i, j, a_grid[i], a_grid[j]};
    }
    i = j + 1;
  }
  return found;
}

}  // namespace treewave
