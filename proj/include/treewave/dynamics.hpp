#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treewave/nonlinearity.hpp"

namespace treewave {

// Explicit time integration on the advective lattice and on truncated
// k-ary trees, plus the comparison-principle harness built on it.

enum class BoundaryRule {
  FrontClamp,  // 0 below the window, 1 above: emulates front tails
  EdgeClamp,   // copy the edge value: emulates a free boundary
};

struct LatticeState {
  int lo = 0, hi = 0;  // inclusive index window
  std::vector<double> u;
  BoundaryRule boundary = BoundaryRule::FrontClamp;

  int size() const { return hi - lo + 1; }
  double& at(int i) { return u[i - lo]; }
  double at(int i) const { return u[i - lo]; }
  // Value extended beyond the window by the boundary rule.
  double ghost(int i) const;

  static LatticeState step_front(int lo, int hi,
                                 BoundaryRule rule = BoundaryRule::FrontClamp);
};

// Rooted presentation of a depth window of the k-ary tree: layer l holds
// k^l nodes; node j of layer l has parent j/k and children j*k .. j*k+k-1.
// k must be integer-valued here.
struct TreeState {
  int i_min = 0, i_max = 0;
  int k = 2;
  std::vector<std::vector<double>> layers;
  BoundaryRule boundary = BoundaryRule::FrontClamp;

  static TreeState layered(int i_min, int i_max, int k,
                           const std::vector<double>& layer_values,
                           BoundaryRule rule = BoundaryRule::FrontClamp);
};

struct DiffusionSchedule {
  std::function<double(double)> d_of_t;
  std::string name;

  double operator()(double t) const { return d_of_t(t); }
  double max_over(double t0, double t1, int samples = 1024) const;

  static DiffusionSchedule constant(double d);
  // 0.001 up to t = 100, then 0.001 + (t-100)/1500: slow diffusion ramp
  // that drags the front through pinned, outward, pinned, inward regimes.
  static DiffusionSchedule reversal();
};

// du_i = d(t) (k u_{i+1} - (k+1) u_i + u_{i-1}) + g(u_i; a).
std::vector<double> rhs_lattice(const System& s, const DiffusionSchedule& sched,
                                double t, const LatticeState& state);

// Graph-Laplacian form d(t) (sum_children u_c + u_parent - (k+1) u) + g(u);
// ghosts by the boundary rule (parent of the root below, children of the
// deepest layer above).
std::vector<std::vector<double>> rhs_tree(const System& s,
                                          const DiffusionSchedule& sched,
                                          double t, const TreeState& state);

using LatticeObserver = std::function<void(double t, const LatticeState&)>;
using TreeObserver = std::function<void(double t, const TreeState&)>;

// Largest step the explicit integrator accepts over [t0, t1]:
// 0.5 / (max d(t) * (k+1) + max_{[0,1]} |g'|).
double stability_limit(const System& s, const DiffusionSchedule& sched,
                       double t0, double t1);

// Classical RK4 from t0 to t1 with steps of at most dt (shrunk to land on
// t1 exactly). Refuses dt above the stability bound
// 0.5 / (max d(t) * (k+1) + max|g'|) with the suggestion in the message.
// The observer sees the initial state and every accepted step.
LatticeState integrate(const System& s, const DiffusionSchedule& sched,
                       LatticeState state, double t0, double t1, double dt,
                       const LatticeObserver& observer = {});

TreeState integrate_tree(const System& s, const DiffusionSchedule& sched,
                         TreeState state, double t0, double t1, double dt,
                         const TreeObserver& observer = {});

// Interpolated index where the profile crosses level; none when the window
// never crosses it.
std::optional<double> front_position(const LatticeState& state,
                                     double level = 0.5);

struct ComparisonReport {
  bool pass = true;
  double t_violation = 0.0;
  int site = 0;
  double gap = 0.0;  // v - u at the violation, positive means order broken
};

// Integrates both states together and checks u >= v - 1e-9 at every step.
// Requires u0 >= v0, matching windows and boundary rules.
ComparisonReport comparison_check(const System& s, const LatticeState& u0,
                                  const LatticeState& v0, double t_end,
                                  double dt);

// Stationary-band barriers from the tail inequalities. When d < d_minus(a)
// there is a u-band (x1, x2) inside (a, 1) where the one-sided bound forces
// du/dt > 0 for monotone fronts, so sites starting at or above x2 never drop
// below it; when d < d_plus(a,k) there is a band (q_lo, q_hi) inside (0, a)
// blocking upward crossings the same way. none when d is above the threshold.
struct InvariantBand {
  double lo = 0.0, hi = 0.0;
};
std::optional<InvariantBand> invariant_band_left(const System& s);
std::optional<InvariantBand> invariant_band_right(const System& s);

struct ReversalResult {
  std::vector<double> times;      // 0 plus the checkpoint times
  std::vector<double> positions;  // front position at each time
  std::vector<std::string> phases;  // one label per segment
  bool expected_sequence = false;   // pinned, right, pinned, left
};

// Step initial data on [-60, 60], the reversal schedule, checkpoints at
// t = 100, 220, 300, 460. Each checkpoint is classified by the front drift
// across a 50-time-unit window centered on it (clipped at the end of the
// run); drift under 0.25 sites per window counts as pinned.
ReversalResult reversal_demo(double k = 2.0, double a = 0.72, double dt = 0.2,
                             const LatticeObserver& observer = {});

}  // namespace treewave
