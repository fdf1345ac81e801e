#include "treewave/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "treewave/kernels.hpp"
#include "treewave/regions.hpp"
#include "treewave/scan.hpp"

namespace treewave {
namespace {

void validate_lattice(const LatticeState& st) {
  if (st.hi < st.lo) throw std::invalid_argument("lattice window is empty");
  if (st.u.size() != static_cast<std::size_t>(st.size()))
    throw std::invalid_argument("lattice value count does not match window");
}

void validate_tree(const TreeState& st) {
  if (st.i_max < st.i_min) throw std::invalid_argument("tree window is empty");
  if (st.k < 1) throw std::invalid_argument("tree branching must be >= 1");
  std::size_t depth = static_cast<std::size_t>(st.i_max - st.i_min + 1);
  if (st.layers.size() != depth)
    throw std::invalid_argument("tree layer count does not match window");
  std::size_t count = 1;
  for (std::size_t l = 0; l < depth; ++l) {
    if (st.layers[l].size() != count)
      throw std::invalid_argument("tree layer has wrong node count");
    count *= static_cast<std::size_t>(st.k);
  }
}

// Largest |g'| over [0,1], sampled; bounds the reaction stiffness.
double max_reaction_slope(const System& s) {
  double m = 0.0;
  for (int i = 0; i <= 1024; ++i) {
    double v = static_cast<double>(i) / 1024.0;
    m = std::max(m, std::abs(s.gv(v)));
  }
  return m;
}

void require_stable_dt(const System& s, const DiffusionSchedule& sched,
                       double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  double limit = stability_limit(s, sched, t0, t1);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the explicit stability bound; use dt <= "
        << limit;
    throw std::invalid_argument(msg.str());
  }
}

void lattice_rhs_into(const System& s, double d, const LatticeState& st,
                      const std::vector<double>& u, std::vector<double>& du) {
  std::size_t n = u.size();
  double left, right;
  if (st.boundary == BoundaryRule::FrontClamp) {
    left = 0.0;
    right = 1.0;
  } else {
    left = u.front();
    right = u.back();
  }
  if (s.nl.kind == Nonlinearity::Kind::Cubic) {
    kernels::cubic_lattice_rhs(u.data(), du.data(), n, d, s.k, s.a, left,
                               right);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double um = i == 0 ? left : u[i - 1];
    double up = i + 1 == n ? right : u[i + 1];
    du[i] = d * (s.k * up - (s.k + 1.0) * u[i] + um) + s.g(u[i]);
  }
}

void tree_rhs_into(const System& s, double d, const TreeState& st,
                   const std::vector<std::vector<double>>& u,
                   std::vector<std::vector<double>>& du) {
  std::size_t depth = u.size();
  std::size_t kk = static_cast<std::size_t>(st.k);
  for (std::size_t l = 0; l < depth; ++l) {
    for (std::size_t j = 0; j < u[l].size(); ++j) {
      double v = u[l][j];
      double coupling;
      double parent;
      if (l > 0)
        parent = u[l - 1][j / kk];
      else
        parent = st.boundary == BoundaryRule::FrontClamp ? 0.0 : v;
      coupling = parent - v;
      if (l + 1 < depth) {
        for (std::size_t c = 0; c < kk; ++c)
          coupling += u[l + 1][j * kk + c] - v;
      } else if (st.boundary == BoundaryRule::FrontClamp) {
        coupling += static_cast<double>(kk) * (1.0 - v);
      }
      du[l][j] = d * coupling + s.g(v);
    }
  }
}

}  // namespace

double stability_limit(const System& s, const DiffusionSchedule& sched,
                       double t0, double t1) {
  double dmax = sched.max_over(t0, t1);
  return 0.5 / (dmax * (s.k + 1.0) + max_reaction_slope(s));
}

double LatticeState::ghost(int i) const {
  if (i >= lo && i <= hi) return at(i);
  if (boundary == BoundaryRule::FrontClamp) return i < lo ? 0.0 : 1.0;
  return i < lo ? u.front() : u.back();
}

LatticeState LatticeState::step_front(int lo, int hi, BoundaryRule rule) {
  if (hi < lo) throw std::invalid_argument("lattice window is empty");
  LatticeState st;
  st.lo = lo;
  st.hi = hi;
  st.boundary = rule;
  st.u.resize(static_cast<std::size_t>(hi - lo + 1));
  for (int i = lo; i <= hi; ++i) st.at(i) = i < 0 ? 0.0 : 1.0;
  return st;
}

TreeState TreeState::layered(int i_min, int i_max, int k,
                             const std::vector<double>& layer_values,
                             BoundaryRule rule) {
  if (i_max < i_min) throw std::invalid_argument("tree window is empty");
  if (k < 1) throw std::invalid_argument("tree branching must be >= 1");
  std::size_t depth = static_cast<std::size_t>(i_max - i_min + 1);
  if (layer_values.size() != depth)
    throw std::invalid_argument("one value per layer is required");
  double total = (std::pow(static_cast<double>(k), static_cast<double>(depth)) -
                  1.0) /
                 (k > 1 ? k - 1.0 : 1.0);
  if (k == 1) total = static_cast<double>(depth);
  if (total > 4.0e6)
    throw std::invalid_argument("tree window too deep for per-node storage");
  TreeState st;
  st.i_min = i_min;
  st.i_max = i_max;
  st.k = k;
  st.boundary = rule;
  st.layers.resize(depth);
  std::size_t count = 1;
  for (std::size_t l = 0; l < depth; ++l) {
    st.layers[l].assign(count, layer_values[l]);
    count *= static_cast<std::size_t>(k);
  }
  return st;
}

double DiffusionSchedule::max_over(double t0, double t1, int samples) const {
  if (t1 < t0) throw std::invalid_argument("time interval is reversed");
  if (samples < 1) samples = 1;
  double m = d_of_t(t0);
  for (int i = 1; i <= samples; ++i) {
    double t = t0 + (t1 - t0) * static_cast<double>(i) / samples;
    m = std::max(m, d_of_t(t));
  }
  return m;
}

DiffusionSchedule DiffusionSchedule::constant(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("d must be >= 0");
  DiffusionSchedule s;
  s.d_of_t = [d](double) { return d; };
  std::ostringstream name;
  name << "const:" << d;
  s.name = name.str();
  return s;
}

DiffusionSchedule DiffusionSchedule::reversal() {
  DiffusionSchedule s;
  s.d_of_t = [](double t) {
    return t <= 100.0 ? 0.001 : 0.001 + (t - 100.0) / 1500.0;
  };
  s.name = "reversal";
  return s;
}

std::vector<double> rhs_lattice(const System& s, const DiffusionSchedule& sched,
                                double t, const LatticeState& state) {
  s.validate();
  validate_lattice(state);
  std::vector<double> du(state.u.size());
  lattice_rhs_into(s, sched(t), state, state.u, du);
  return du;
}

std::vector<std::vector<double>> rhs_tree(const System& s,
                                          const DiffusionSchedule& sched,
                                          double t, const TreeState& state) {
  s.validate();
  validate_tree(state);
  std::vector<std::vector<double>> du(state.layers.size());
  for (std::size_t l = 0; l < du.size(); ++l)
    du[l].resize(state.layers[l].size());
  tree_rhs_into(s, sched(t), state, state.layers, du);
  return du;
}

LatticeState integrate(const System& s, const DiffusionSchedule& sched,
                       LatticeState state, double t0, double t1, double dt,
                       const LatticeObserver& observer) {
  s.validate();
  validate_lattice(state);
  if (t1 < t0) throw std::invalid_argument("time interval is reversed");
  require_stable_dt(s, sched, t0, t1, dt);
  long steps = std::lround(std::ceil((t1 - t0) / dt - 1e-9));
  if (steps < 1) steps = 1;
  double h = (t1 - t0) / static_cast<double>(steps);
  if (t1 == t0) {
    if (observer) observer(t0, state);
    return state;
  }

  std::size_t n = state.u.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  if (observer) observer(t0, state);
  for (long step = 0; step < steps; ++step) {
    double t = t0 + h * static_cast<double>(step);
    lattice_rhs_into(s, sched(t), state, state.u, k1);
    stage = state.u;
    kernels::axpy(0.5 * h, k1.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t + 0.5 * h), state, stage, k2);
    stage = state.u;
    kernels::axpy(0.5 * h, k2.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t + 0.5 * h), state, stage, k3);
    stage = state.u;
    kernels::axpy(h, k3.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t + h), state, stage, k4);
    kernels::rk4_combine(state.u.data(), k1.data(), k2.data(), k3.data(),
                         k4.data(), stage.data(), n, h);
    state.u.swap(stage);
    if (observer) observer(t0 + h * static_cast<double>(step + 1), state);
  }
  return state;
}

TreeState integrate_tree(const System& s, const DiffusionSchedule& sched,
                         TreeState state, double t0, double t1, double dt,
                         const TreeObserver& observer) {
  s.validate();
  validate_tree(state);
  if (static_cast<double>(state.k) != s.k)
    throw std::invalid_argument("tree branching must match the system's k");
  if (t1 < t0) throw std::invalid_argument("time interval is reversed");
  require_stable_dt(s, sched, t0, t1, dt);
  long steps = std::lround(std::ceil((t1 - t0) / dt - 1e-9));
  if (steps < 1) steps = 1;
  double h = (t1 - t0) / static_cast<double>(steps);
  if (t1 == t0) {
    if (observer) observer(t0, state);
    return state;
  }

  auto zero_like = [&]() {
    std::vector<std::vector<double>> z(state.layers.size());
    for (std::size_t l = 0; l < z.size(); ++l)
      z[l].resize(state.layers[l].size());
    return z;
  };
  auto k1 = zero_like(), k2 = zero_like(), k3 = zero_like(), k4 = zero_like();
  auto stage = zero_like();
  auto staged = [&](const std::vector<std::vector<double>>& slope,
                    double alpha) {
    for (std::size_t l = 0; l < stage.size(); ++l)
      for (std::size_t j = 0; j < stage[l].size(); ++j)
        stage[l][j] = state.layers[l][j] + alpha * slope[l][j];
  };

  if (observer) observer(t0, state);
  for (long step = 0; step < steps; ++step) {
    double t = t0 + h * static_cast<double>(step);
    tree_rhs_into(s, sched(t), state, state.layers, k1);
    staged(k1, 0.5 * h);
    tree_rhs_into(s, sched(t + 0.5 * h), state, stage, k2);
    staged(k2, 0.5 * h);
    tree_rhs_into(s, sched(t + 0.5 * h), state, stage, k3);
    staged(k3, h);
    tree_rhs_into(s, sched(t + h), state, stage, k4);
    for (std::size_t l = 0; l < state.layers.size(); ++l)
      for (std::size_t j = 0; j < state.layers[l].size(); ++j)
        state.layers[l][j] += (h / 6.0) * (k1[l][j] + 2.0 * k2[l][j] +
                                           2.0 * k3[l][j] + k4[l][j]);
    if (observer) observer(t0 + h * static_cast<double>(step + 1), state);
  }
  return state;
}

std::optional<double> front_position(const LatticeState& state, double level) {
  validate_lattice(state);
  for (int i = state.lo; i < state.hi; ++i) {
    double a = state.at(i), b = state.at(i + 1);
    if (a < level && b >= level)
      return static_cast<double>(i) + (level - a) / (b - a);
  }
  return std::nullopt;
}

ComparisonReport comparison_check(const System& s, const LatticeState& u0,
                                  const LatticeState& v0, double t_end,
                                  double dt) {
  s.validate();
  validate_lattice(u0);
  validate_lattice(v0);
  if (u0.lo != v0.lo || u0.hi != v0.hi || u0.boundary != v0.boundary)
    throw std::domain_error("comparison requires matching windows");
  for (std::size_t i = 0; i < u0.u.size(); ++i)
    if (u0.u[i] < v0.u[i])
      throw std::domain_error("comparison requires ordered initial data");

  DiffusionSchedule sched = DiffusionSchedule::constant(s.d);
  require_stable_dt(s, sched, 0.0, t_end, dt);

  ComparisonReport rep;
  LatticeState upper = u0;
  // Step the pair in lockstep so every sample instant matches.
  long steps = std::lround(std::ceil(t_end / dt - 1e-9));
  if (steps < 1) steps = 1;
  double h = t_end / static_cast<double>(steps);
  LatticeState lower = v0;
  std::size_t n = u0.u.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  auto advance = [&](LatticeState& st, double t) {
    lattice_rhs_into(s, sched(t), st, st.u, k1);
    stage = st.u;
    kernels::axpy(0.5 * h, k1.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t), st, stage, k2);
    stage = st.u;
    kernels::axpy(0.5 * h, k2.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t), st, stage, k3);
    stage = st.u;
    kernels::axpy(h, k3.data(), stage.data(), n);
    lattice_rhs_into(s, sched(t), st, stage, k4);
    kernels::rk4_combine(st.u.data(), k1.data(), k2.data(), k3.data(),
                         k4.data(), stage.data(), n, h);
    st.u.swap(stage);
  };
  for (long step = 0; step < steps; ++step) {
    double t = h * static_cast<double>(step);
    advance(upper, t);
    advance(lower, t);
    for (std::size_t i = 0; i < n; ++i) {
      if (upper.u[i] < lower.u[i] - 1e-9) {
        rep.pass = false;
        rep.t_violation = h * static_cast<double>(step + 1);
        rep.site = u0.lo + static_cast<int>(i);
        rep.gap = lower.u[i] - upper.u[i];
        return rep;
      }
    }
  }
  return rep;
}

std::optional<InvariantBand> invariant_band_left(const System& s) {
  s.validate();
  ThresholdDetail dm = d_minus_detail(s.nl, s.a);
  if (!(s.d < dm.value)) return std::nullopt;
  if (s.d == 0.0) return InvariantBand{s.a, 1.0};
  auto f = [&](double y) { return s.d * y - s.g(y); };
  double x1 = bisect_root(f, s.a, dm.arg);
  double x2 = bisect_root(f, dm.arg, 1.0);
  return InvariantBand{x1, x2};
}

std::optional<InvariantBand> invariant_band_right(const System& s) {
  s.validate();
  ThresholdDetail dp = d_plus_detail(s.nl, s.a, s.k);
  if (!(s.d < dp.value)) return std::nullopt;
  if (s.d == 0.0) return InvariantBand{0.0, s.a};
  auto f = [&](double y) { return s.d * s.k * y + s.g(1.0 - y); };
  double y1 = bisect_root(f, 1.0 - s.a, dp.arg);
  double y2 = bisect_root(f, dp.arg, 1.0);
  return InvariantBand{1.0 - y2, 1.0 - y1};
}

ReversalResult reversal_demo(double k, double a, double dt,
                             const LatticeObserver& observer) {
  System s = System::cubic(a, 0.001, k);
  DiffusionSchedule sched = DiffusionSchedule::reversal();
  LatticeState st = LatticeState::step_front(-60, 60);

  ReversalResult res;
  const double checkpoints[] = {100.0, 220.0, 300.0, 460.0};
  const double t_end = 460.0;
  res.times.push_back(0.0);
  res.positions.push_back(front_position(st).value_or(
      std::numeric_limits<double>::quiet_NaN()));
  double t = 0.0;
  auto advance = [&](double to) {
    if (to > t) {
      st = integrate(s, sched, std::move(st), t, to, dt, observer);
      t = to;
    }
    return front_position(st).value_or(
        std::numeric_limits<double>::quiet_NaN());
  };
  // Each checkpoint is classified by the drift across a 50-time-unit window
  // centered on it (clipped at the end of the run): the schedule never stops
  // ramping, so a phase is a property of the moment, not of the stretch
  // since the previous checkpoint.
  for (double tc : checkpoints) {
    double p_lo = advance(std::max(t, tc - 25.0));
    double w_lo = t;
    res.times.push_back(tc);
    res.positions.push_back(advance(tc));
    double w_hi = std::min(t_end, tc + 25.0);
    double p_hi = advance(w_hi);
    double rate = (p_hi - p_lo) / (w_hi - w_lo) * 50.0;
    if (std::abs(rate) < 0.25)
      res.phases.push_back("pinned");
    else
      res.phases.push_back(rate > 0.0 ? "right" : "left");
  }
  res.expected_sequence =
      res.phases == std::vector<std::string>{"pinned", "right", "pinned",
                                             "left"};
  return res;
}

}  // namespace treewave
