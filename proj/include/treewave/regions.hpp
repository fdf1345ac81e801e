#pragma once
#include <optional>
#include <string>
#include <vector>

#include "treewave/nonlinearity.hpp"

namespace treewave {

// Analytic parameter-region machinery: threshold curves below which fronts
// pin, slope certificates that force the speed sign, and the closed-form
// cubic boundaries. Everything here is O(grid) arithmetic; no time stepping.

enum class RegionVerdict {
  PinnedGuaranteed,
  NegativeSpeed,
  PositiveSpeed,
  NegativeByLargeD,
  Unknown,
};

std::string to_string(RegionVerdict v);

// Pinning threshold from the left equilibrium: max_{y in (a,1)} g(y;a)/y.
// Cubic shortcut (1-a)^2/4. The maximiser should be interior under the
// bistability hypotheses; d_minus_detail exposes that flag.
double d_minus(const Nonlinearity& nl, double a);
struct ThresholdDetail {
  double value = 0.0;
  double arg = 0.0;
  bool interior = false;
};
ThresholdDetail d_minus_detail(const Nonlinearity& nl, double a);

// Mirror threshold: max_{y in (1-a,1)} -g(1-y;a)/(k y). Cubic a^2/(4k).
double d_plus(const Nonlinearity& nl, double a, double k);
ThresholdDetail d_plus_detail(const Nonlinearity& nl, double a, double k);

// Large-diffusion threshold (1 - k^{-1/2})^{-2} d_plus(a,k); above it the
// speed is negative whenever k > 1. Throws std::domain_error for k <= 1.
double d_star(const Nonlinearity& nl, double a, double k);

// Minimal scaled slope for which the line through (A, -g(A;a)) with slope
// d(k+1) stays above -g on [0,A): max_{v in [0,A)} (g(A)-g(v))/((k+1)(A-v)).
// Cubic dispatches on A against the inflection point v_i = (a+1)/3.
// Requires 0 < a < A < 1.
double d_diamond(const Nonlinearity& nl, double A, double a, double k);

// Slack functional max_{v in [0,A]} ( d(k+1)v - dkA - g(v;a) ); strictly
// negative values certify membership of the negative-speed region.
double j_minus(const Nonlinearity& nl, double a, double d, double A, double k);

struct Membership {
  bool inside = false;
  std::optional<double> witness_A;  // minimiser of the slack when inside
  double min_slack = 0.0;
};

// Negative-speed region: exists A in (a,1) with j_minus < -1e-12*max(1,d).
// For cubic systems the scan verdict is cross-checked against the
// closed-form band; a definitive disagreement throws std::logic_error.
Membership in_D_minus(const System& s);

// Positive-speed region, evaluated on the reflected system (the witness A
// lives in reflected coordinates).
Membership in_D_plus(const System& s);

// Guaranteed-pinning region: d < min{d_minus(a), d_plus(a,k)}.
bool in_D_zero(const System& s);

// Threshold below which the planar-map certificate for steady-state chaos
// holds. Cubic: min{a^2/4, (1-a)^2/4}/(k+1). Custom families bisect on the
// certificate check itself.
double d_zero(const Nonlinearity& nl, double a, double k);

// Closed-form cubic corner values and boundary curves. Curves are sampled
// on a uniform a-grid; entries are NaN where a curve is undefined.
struct CubicBoundary {
  double k = 2.0;
  double a_star_minus = 0.0;
  double a1_minus = 0.0;
  double a_star_plus = 0.0;
  double a1_plus = 0.0;
  std::vector<double> a_grid;
  std::vector<double> d_minus_curve;
  std::vector<double> d_plus_curve;
  std::vector<double> d_star_curve;
  std::vector<double> d0_curve;
  std::vector<double> dminus_min_curve;
  std::vector<double> dminus_max_curve;
  std::vector<double> dplus_min_curve;
  std::vector<double> dplus_max_curve;
};
CubicBoundary cubic_boundaries(double k, int n_a = 241);

namespace cubic_forms {
double a_star_minus(double k);
double a1_minus(double k);
double a_star_plus(double k);
double a1_plus(double k);
double a2(double k);
// NaN outside the domain of definition ([0, a_star_minus] resp.
// [a_star_plus, 1]). The plus-side curves are the reflections
// d_plus_min(a,k) = d_minus_min(1-a, 1/k)/k (likewise max).
double d_minus_min(double a, double k);
double d_minus_max(double a, double k);
double d_plus_min(double a, double k);
double d_plus_max(double a, double k);
}  // namespace cubic_forms

struct Classification {
  RegionVerdict verdict = RegionVerdict::Unknown;
  std::optional<double> witness_A;
};

// Fixed theorem precedence: pinned region, negative-speed region,
// positive-speed region, large-d negative speed (k > 1), else Unknown.
Classification classify(const System& s);

// Continuum prediction sqrt((k+1)d)(a - 1/2) - (k-1)d, cubic-specific.
double asymptotic_speed(double a, double d, double k);
// Diffusion at which the prediction changes sign, (k+1)/(k-1)^2 (a-1/2)^2;
// requires k > 1.
double critical_d(double a, double k);

}  // namespace treewave
