#include "treewave/regions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "treewave/chaos.hpp"
#include "treewave/scan.hpp"

namespace treewave {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_cubic(const Nonlinearity& nl) {
  return nl.kind == Nonlinearity::Kind::Cubic;
}

}  // namespace

std::string to_string(RegionVerdict v) {
  switch (v) {
    case RegionVerdict::PinnedGuaranteed: return "PinnedGuaranteed";
    case RegionVerdict::NegativeSpeed: return "NegativeSpeed";
    case RegionVerdict::PositiveSpeed: return "PositiveSpeed";
    case RegionVerdict::NegativeByLargeD: return "NegativeByLargeD";
    case RegionVerdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

ThresholdDetail d_minus_detail(const Nonlinearity& nl, double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("a must lie in (0,1)");
  if (is_cubic(nl)) {
    return {(1.0 - a) * (1.0 - a) / 4.0, (1.0 + a) / 2.0, true};
  }
  auto f = [&](double y) { return y > 0.0 ? nl.g(y, a) / y : 0.0; };
  MaxResult r = max_scan(f, a, 1.0);
  return {r.value, r.x, r.interior};
}

double d_minus(const Nonlinearity& nl, double a) {
  return d_minus_detail(nl, a).value;
}

ThresholdDetail d_plus_detail(const Nonlinearity& nl, double a, double k) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("a must lie in (0,1)");
  if (!(k > 0.0)) throw std::domain_error("k must be > 0");
  if (is_cubic(nl)) {
    return {a * a / (4.0 * k), (2.0 - a) / 2.0, true};
  }
  auto f = [&](double y) { return y > 0.0 ? -nl.g(1.0 - y, a) / (k * y) : 0.0; };
  MaxResult r = max_scan(f, 1.0 - a, 1.0);
  return {r.value, r.x, r.interior};
}

double d_plus(const Nonlinearity& nl, double a, double k) {
  return d_plus_detail(nl, a, k).value;
}

double d_star(const Nonlinearity& nl, double a, double k) {
  if (!(k > 1.0))
    throw std::domain_error(
        "k must exceed 1 for the large-diffusion threshold");
  double f = 1.0 - 1.0 / std::sqrt(k);
  return d_plus(nl, a, k) / (f * f);
}

double d_diamond(const Nonlinearity& nl, double A, double a, double k) {
  if (!(a > 0.0 && a < A && A < 1.0))
    throw std::domain_error("need 0 < a < A < 1");
  if (!(k > 0.0)) throw std::domain_error("k must be > 0");
  if (is_cubic(nl)) {
    double vi = (a + 1.0) / 3.0;
    if (A > vi) {
      // Tangency interior to [0,A), touching point (1+a-A)/2.
      return (-3.0 * A * A + 2.0 * (a + 1.0) * A + (a - 1.0) * (a - 1.0)) /
             (4.0 * (k + 1.0));
    }
    return nl.gv(A, a) / (k + 1.0);  // tangency in the limit v -> A
  }
  double gA = nl.g(A, a);
  auto f = [&](double v) { return (gA - nl.g(v, a)) / ((k + 1.0) * (A - v)); };
  return max_scan(f, 0.0, A - 1e-9 * A).value;
}

double j_minus(const Nonlinearity& nl, double a, double d, double A,
               double k) {
  auto f = [&](double v) {
    return d * (k + 1.0) * v - d * k * A - nl.g(v, a);
  };
  return max_scan(f, 0.0, A).value;
}

Membership in_D_minus(const System& s) {
  s.validate();
  double tol = 1e-12 * std::max(1.0, s.d);
  auto neg_slack = [&](double A) {
    return -j_minus(s.nl, s.a, s.d, A, s.k);
  };
  MaxResult r = max_scan(neg_slack, s.a, 1.0, 512);
  Membership m;
  m.min_slack = -r.value;
  m.inside = m.min_slack < -tol;
  if (m.inside) m.witness_A = r.x;

  if (is_cubic(s.nl)) {
    // Closed-form band must agree away from its boundary; a definitive
    // mismatch means one of the two computations is broken.
    double as = cubic_forms::a_star_minus(s.k);
    double margin_a = 1e-7;
    double margin_d = 1e-7 * std::max(1.0, s.d);
    if (std::abs(s.a - as) > margin_a) {
      bool closed = false;
      if (s.a < as) {
        double lo = cubic_forms::d_minus_min(s.a, s.k);
        double hi = cubic_forms::d_minus_max(s.a, s.k);
        if (std::abs(s.d - lo) <= margin_d || std::abs(s.d - hi) <= margin_d)
          return m;  // too close to the band edge to arbitrate
        closed = s.d > lo && s.d < hi;
      }
      if (closed != m.inside)
        throw std::logic_error(
            "negative-speed membership scan disagrees with closed form");
    }
  }
  return m;
}

Membership in_D_plus(const System& s) { return in_D_minus(reflect(s)); }

bool in_D_zero(const System& s) {
  s.validate();
  return s.d < std::min(d_minus(s.nl, s.a), d_plus(s.nl, s.a, s.k));
}

double d_zero(const Nonlinearity& nl, double a, double k) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("a must lie in (0,1)");
  if (!(k > 0.0)) throw std::domain_error("k must be > 0");
  if (is_cubic(nl)) {
    return std::min(a * a, (1.0 - a) * (1.0 - a)) / (4.0 * (k + 1.0));
  }
  // Largest d whose planar-map certificate check succeeds, by bisection.
  auto ok = [&](double d) {
    System s;
    s.nl = nl;
    s.a = a;
    s.d = d;
    s.k = k;
    return check_Hd(s).has_value();
  };
  double hi = std::max(1e-6, d_minus(nl, a));
  double lo = 0.0;
  int grow = 0;
  while (ok(hi) && grow < 64) {
    lo = hi;
    hi *= 2.0;
    ++grow;
  }
  if (grow == 64) return lo;
  if (lo == 0.0) {
    double t = hi / 2.0;
    int shrink = 0;
    while (shrink < 64 && !ok(t)) {
      t /= 2.0;
      ++shrink;
    }
    if (shrink == 64) return 0.0;  // no positive d certified
    lo = t;
    hi = 2.0 * t;
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace cubic_forms {

double a_star_minus(double k) {
  return 1.0 - 2.0 / (std::sqrt(4.0 * k + 1.0) + 1.0);
}

double a1_minus(double k) {
  return std::max(1.0 - 2.0 / (2.0 * std::sqrt(k) + 1.0), 0.0);
}

double a_star_plus(double k) {
  return (std::sqrt(4.0 * k + k * k) - k) / 2.0;
}

double a1_plus(double k) {
  return std::min(2.0 * std::sqrt(k) / (2.0 + std::sqrt(k)), 1.0);
}

double a2(double k) {
  double s = std::sqrt(k + 4.0);
  return std::max(0.0, 1.0 - 2.0 * s / (s + 3.0 * std::sqrt(k)));
}

namespace {

// Shared quadratic-root expression behind the lower/upper band boundary;
// sign picks the branch. Valid for 0 <= a <= a_star_minus(k) where the
// discriminant k a^2 - a(2k+1) + k is non-negative.
double d_minus_branch(double a, double k, double sign) {
  if (a < 0.0 || a > a_star_minus(k) + 1e-15) return kNaN;
  double disc = k * a * a - a * (2.0 * k + 1.0) + k;
  if (disc < 0.0) disc = 0.0;  // roundoff at the right endpoint
  double den = (4.0 * k + 1.0) * (4.0 * k + 1.0);
  return (2.0 * a * a * k - a + 2.0 * k +
          sign * 2.0 * (a + 1.0) * std::sqrt(k) * std::sqrt(disc)) /
         den;
}

}  // namespace

double d_minus_min(double a, double k) { return d_minus_branch(a, k, -1.0); }

double d_minus_max(double a, double k) {
  if (a < 0.0 || a > a_star_minus(k) + 1e-15) return kNaN;
  if (a < a1_minus(k)) return (1.0 - a) * (1.0 - a) / 4.0;
  return d_minus_branch(a, k, +1.0);
}

double d_plus_min(double a, double k) {
  return d_minus_min(1.0 - a, 1.0 / k) / k;
}

double d_plus_max(double a, double k) {
  return d_minus_max(1.0 - a, 1.0 / k) / k;
}

}  // namespace cubic_forms

CubicBoundary cubic_boundaries(double k, int n_a) {
  if (!(k > 0.0)) throw std::domain_error("k must be > 0");
  if (n_a < 2) n_a = 2;
  CubicBoundary b;
  b.k = k;
  b.a_star_minus = cubic_forms::a_star_minus(k);
  b.a1_minus = cubic_forms::a1_minus(k);
  b.a_star_plus = cubic_forms::a_star_plus(k);
  b.a1_plus = cubic_forms::a1_plus(k);
  double sk = std::sqrt(k);
  for (int i = 0; i < n_a; ++i) {
    double a = static_cast<double>(i) / (n_a - 1);
    b.a_grid.push_back(a);
    b.d_minus_curve.push_back((1.0 - a) * (1.0 - a) / 4.0);
    b.d_plus_curve.push_back(a * a / (4.0 * k));
    b.d_star_curve.push_back(
        k > 1.0 ? a * a / (4.0 * (sk - 1.0) * (sk - 1.0)) : kNaN);
    b.d0_curve.push_back(std::min(a * a, (1.0 - a) * (1.0 - a)) /
                         (4.0 * (k + 1.0)));
    b.dminus_min_curve.push_back(cubic_forms::d_minus_min(a, k));
    b.dminus_max_curve.push_back(cubic_forms::d_minus_max(a, k));
    double ap = cubic_forms::a_star_plus(k);
    b.dplus_min_curve.push_back(a >= ap ? cubic_forms::d_plus_min(a, k)
                                        : kNaN);
    b.dplus_max_curve.push_back(a >= ap ? cubic_forms::d_plus_max(a, k)
                                        : kNaN);
  }
  return b;
}

Classification classify(const System& s) {
  s.validate();
  if (in_D_zero(s)) return {RegionVerdict::PinnedGuaranteed, std::nullopt};
  Membership neg = in_D_minus(s);
  if (neg.inside) return {RegionVerdict::NegativeSpeed, neg.witness_A};
  Membership pos = in_D_plus(s);
  if (pos.inside) return {RegionVerdict::PositiveSpeed, pos.witness_A};
  if (s.k > 1.0 && s.d > d_star(s.nl, s.a, s.k))
    return {RegionVerdict::NegativeByLargeD, std::nullopt};
  return {RegionVerdict::Unknown, std::nullopt};
}

double asymptotic_speed(double a, double d, double k) {
  return std::sqrt((k + 1.0) * d) * (a - 0.5) - (k - 1.0) * d;
}

double critical_d(double a, double k) {
  if (!(k > 1.0)) throw std::domain_error("k must exceed 1");
  double t = a - 0.5;
  return (k + 1.0) / ((k - 1.0) * (k - 1.0)) * t * t;
}

}  // namespace treewave
