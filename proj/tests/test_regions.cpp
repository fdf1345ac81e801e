#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "treewave/nonlinearity.hpp"
#include "treewave/regions.hpp"

using namespace treewave;

namespace {

// Brute-force oracles: plain dense grids, no refinement tricks. These pin
// down what the production scans must reproduce.

double brute_d_minus(const Nonlinearity& nl, double a, int n = 200000) {
  double best = -1e300;
  for (int i = 1; i <= n; ++i) {
    double y = a + (1.0 - a) * static_cast<double>(i) / n;
    best = std::max(best, nl.g(y, a) / y);
  }
  return best;
}

double brute_d_plus(const Nonlinearity& nl, double a, double k,
                    int n = 200000) {
  double best = -1e300;
  for (int i = 1; i <= n; ++i) {
    double y = (1.0 - a) + a * static_cast<double>(i) / n;
    best = std::max(best, -nl.g(1.0 - y, a) / (k * y));
  }
  return best;
}

double brute_d_diamond(const Nonlinearity& nl, double A, double a, double k,
                       int n = 200000) {
  double gA = nl.g(A, a);
  double best = nl.gv(A, a) / (k + 1.0);  // sup candidate at the open end
  for (int i = 0; i < n; ++i) {
    double v = A * static_cast<double>(i) / n;
    best = std::max(best, (gA - nl.g(v, a)) / ((k + 1.0) * (A - v)));
  }
  return best;
}

double brute_j_minus(const Nonlinearity& nl, double a, double d, double A,
                     double k, int n = 200000) {
  double best = -1e300;
  for (int i = 0; i <= n; ++i) {
    double v = A * static_cast<double>(i) / n;
    best = std::max(best, d * (k + 1.0) * v - d * k * A - nl.g(v, a));
  }
  return best;
}

// Membership oracle straight from the definition: some plateau A in (a,1)
// with a strictly negative slack.
bool oracle_in_D_minus(const System& s, int n_A = 600, int n_v = 600) {
  double tol = 1e-12 * std::max(1.0, s.d);
  for (int ia = 1; ia < n_A; ++ia) {
    double A = s.a + (1.0 - s.a) * static_cast<double>(ia) / n_A;
    double best = -1e300;
    for (int iv = 0; iv <= n_v; ++iv) {
      double v = A * static_cast<double>(iv) / n_v;
      best = std::max(best,
                      s.d * (s.k + 1.0) * v - s.d * s.k * A - s.g(v));
    }
    if (best < -tol) return true;
  }
  return false;
}

Nonlinearity cubic_as_custom() {
  return Nonlinearity::custom(
      "cubic-scan",
      [](double v, double a) { return v * (1.0 - v) * (v - a); },
      [](double v, double a) {
        return -3.0 * v * v + 2.0 * (1.0 + a) * v - a;
      },
      [](double v, double a) { return -6.0 * v + 2.0 * (1.0 + a); },
      [](double v, double) { return -v * (1.0 - v); });
}

}  // namespace

TEST_CASE("pinning threshold from the left equilibrium") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(d_minus(cubic, 0.5) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(d_minus(cubic, 0.3) == doctest::Approx(0.1225).epsilon(1e-12));
  for (double a : {0.1, 0.3, 0.52, 0.7, 0.9}) {
    CHECK(d_minus(cubic, a) ==
          doctest::Approx(brute_d_minus(cubic, a)).epsilon(1e-8));
    ThresholdDetail det = d_minus_detail(cubic, a);
    CHECK(det.interior);
    CHECK(det.arg == doctest::Approx((1.0 + a) / 2.0).epsilon(1e-9));
  }
  // The generic scan path must land on the same values.
  Nonlinearity scan_path = cubic_as_custom();
  for (double a : {0.2, 0.5, 0.8})
    CHECK(d_minus(scan_path, a) ==
          doctest::Approx(d_minus(cubic, a)).epsilon(1e-9));
  CHECK_THROWS_AS(d_minus(cubic, 1.2), std::domain_error);
}

TEST_CASE("mirror pinning threshold") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(d_plus(cubic, 0.5, 4.0) == doctest::Approx(0.015625).epsilon(1e-12));
  CHECK(d_plus(cubic, 0.6, 2.0) == doctest::Approx(0.045).epsilon(1e-12));
  for (double a : {0.2, 0.5, 0.8}) {
    for (double k : {0.5, 2.0, 5.0}) {
      CHECK(d_plus(cubic, a, k) ==
            doctest::Approx(brute_d_plus(cubic, a, k)).epsilon(1e-8));
      // Reflection of the left threshold.
      CHECK(d_plus(cubic, a, k) * k ==
            doctest::Approx(d_minus(cubic, 1.0 - a)).epsilon(1e-12));
    }
  }
  Nonlinearity scan_path = cubic_as_custom();
  CHECK(d_plus(scan_path, 0.6, 2.0) ==
        doctest::Approx(0.045).epsilon(1e-9));
}

TEST_CASE("large-diffusion threshold") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(std::abs(d_star(cubic, 0.1933, 5.0) - 0.006106) < 1e-5);
  CHECK(d_star(cubic, 0.72, 2.0) == doctest::Approx(0.7554).epsilon(2e-4));
  for (double k : {1.5, 2.0, 5.0}) {
    double scale = 1.0 / ((1.0 - 1.0 / std::sqrt(k)) * (1.0 - 1.0 / std::sqrt(k)));
    CHECK(d_star(cubic, 0.4, k) ==
          doctest::Approx(scale * d_plus(cubic, 0.4, k)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(d_star(cubic, 0.4, 1.0), std::domain_error);
  CHECK_THROWS_AS(d_star(cubic, 0.4, 0.5), std::domain_error);
}

TEST_CASE("touching-slope threshold d_diamond") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(d_diamond(cubic, 0.8, 0.2, 2.0) ==
        doctest::Approx(0.8 / 15.0).epsilon(1e-12));
  // Below the inflection the binding point is v = A itself.
  double a = 0.2, A = 0.3, k = 2.0;
  CHECK(d_diamond(cubic, A, a, k) ==
        doctest::Approx(cubic.gv(A, a) / (k + 1.0)).epsilon(1e-12));
  for (double AA : {0.25, 0.45, 0.6, 0.8, 0.95}) {
    CHECK(d_diamond(cubic, AA, 0.2, 2.0) ==
          doctest::Approx(brute_d_diamond(cubic, AA, 0.2, 2.0)).epsilon(1e-7));
  }
  Nonlinearity scan_path = cubic_as_custom();
  CHECK(d_diamond(scan_path, 0.8, 0.2, 2.0) ==
        doctest::Approx(0.8 / 15.0).epsilon(1e-8));
  CHECK_THROWS_AS(d_diamond(cubic, 0.2, 0.2, 2.0), std::domain_error);
  CHECK_THROWS_AS(d_diamond(cubic, 1.0, 0.2, 2.0), std::domain_error);
  CHECK_THROWS_AS(d_diamond(cubic, 0.5, 0.0, 2.0), std::domain_error);
}

TEST_CASE("slack functional") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(std::abs(j_minus(cubic, 0.1, 0.0, 0.9, 2.0) - 0.002375) < 5e-6);
  // At A = a with coupling dominating the reaction slope the max sits at
  // v = A and the slack is exactly d*a.
  CHECK(j_minus(cubic, 0.3, 0.1, 0.3, 2.0) ==
        doctest::Approx(0.03).epsilon(1e-9));
  for (double A : {0.4, 0.7, 0.95}) {
    CHECK(j_minus(cubic, 0.3, 0.07, A, 2.0) ==
          doctest::Approx(brute_j_minus(cubic, 0.3, 0.07, A, 2.0))
              .epsilon(1e-7));
  }
}

TEST_CASE("membership scans against the definition oracle") {
  struct Point {
    double a, d, k;
  };
  // Interior points chosen with a wide margin from the band edges.
  for (const Point& p : {Point{0.2, 0.05, 2.0}, Point{0.3, 0.08, 2.0},
                         Point{0.1, 0.03, 2.0}, Point{0.35, 0.1, 3.0}}) {
    System s = System::cubic(p.a, p.d, p.k);
    Membership m = in_D_minus(s);
    CHECK(m.inside == oracle_in_D_minus(s));
    CHECK(m.inside);
    REQUIRE(m.witness_A.has_value());
    CHECK(j_minus(s.nl, s.a, s.d, *m.witness_A, s.k) < 0.0);
  }
  for (const Point& p : {Point{0.2, 0.3, 2.0}, Point{0.7, 0.05, 2.0},
                         Point{0.2, 1e-4, 2.0}}) {
    System s = System::cubic(p.a, p.d, p.k);
    Membership m = in_D_minus(s);
    CHECK(m.inside == oracle_in_D_minus(s));
    CHECK_FALSE(m.inside);
  }

  // The positive-speed region is the reflection.
  System plus_in = System::cubic(0.8, 0.05, 2.0);
  CHECK(in_D_plus(plus_in).inside);
  CHECK(in_D_plus(plus_in).inside ==
        oracle_in_D_minus(reflect(plus_in)));
  System plus_out = System::cubic(0.3, 0.05, 2.0);
  CHECK_FALSE(in_D_plus(plus_out).inside);

  // Guaranteed pinning below both thresholds.
  CHECK(in_D_zero(System::cubic(0.52, 0.01, 2.0)));
  CHECK_FALSE(in_D_zero(System::cubic(0.52, 0.05, 2.0)));
}

TEST_CASE("closed-form corner values and cubic bands") {
  namespace cf = cubic_forms;
  CHECK(cf::a_star_minus(2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cf::a_star_plus(2.0) ==
        doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-10));
  CHECK(cf::a1_minus(0.25) == 0.0);
  CHECK(cf::a1_plus(2.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0) / (2.0 + std::sqrt(2.0)))
            .epsilon(1e-12));
  // Reflection between the star corners.
  for (double k : {0.4, 2.0, 5.0})
    CHECK(cf::a_star_plus(k) ==
          doctest::Approx(1.0 - cf::a_star_minus(1.0 / k)).epsilon(1e-12));

  // Band collapse at the right corner.
  double dm = cf::d_minus_min(0.5, 2.0), dM = cf::d_minus_max(0.5, 2.0);
  CHECK(dm == doctest::Approx(4.5 / 81.0).epsilon(1e-12));
  CHECK(dM == doctest::Approx(4.5 / 81.0).epsilon(1e-12));
  // Branch switch of the upper curve is continuous.
  double a1 = cf::a1_minus(2.0);
  CHECK(a1 == doctest::Approx(0.47759).epsilon(1e-4));
  CHECK(cf::d_minus_max(a1 - 1e-9, 2.0) ==
        doctest::Approx(cf::d_minus_max(a1 + 1e-9, 2.0)).epsilon(1e-6));
  CHECK(cf::d_minus_max(a1, 2.0) == doctest::Approx(0.06823).epsilon(1e-4));
  // Outside the domain the curves are undefined.
  CHECK(std::isnan(cf::d_minus_min(0.6, 2.0)));
  CHECK(std::isnan(cf::d_minus_max(0.6, 2.0)));
  CHECK(std::isnan(cf::d_plus_min(0.3, 2.0)));

  // The plus-side curves are the reflected minus-side curves.
  for (double a : {0.75, 0.8, 0.9}) {
    CHECK(cf::d_plus_min(a, 2.0) ==
          doctest::Approx(cf::d_minus_min(1.0 - a, 0.5) / 2.0).epsilon(1e-12));
    CHECK(cf::d_plus_max(a, 2.0) ==
          doctest::Approx(cf::d_minus_max(1.0 - a, 0.5) / 2.0).epsilon(1e-12));
  }

  // Ordering of the corner abscissae.
  for (double k : {0.6, 1.0, 2.0, 5.0}) {
    CHECK(cf::a2(k) <= cf::a1_minus(k) + 1e-12);
    CHECK(cf::a1_minus(k) < cf::a_star_minus(k));
  }
  CHECK(cf::a2(0.4) == 0.0);  // a2 > 0 only for k > 1/2
  CHECK(cf::a2(2.0) > 0.0);

  // The membership scan agrees with the band on a vertical slice.
  double a = 0.3, k = 2.0;
  double lo = cf::d_minus_min(a, k), hi = cf::d_minus_max(a, k);
  CHECK(in_D_minus(System::cubic(a, 0.5 * (lo + hi), k)).inside);
  CHECK_FALSE(in_D_minus(System::cubic(a, 0.5 * lo, k)).inside);
  CHECK_FALSE(in_D_minus(System::cubic(a, 1.5 * hi, k)).inside);

  // Membership at the line d = a(1-a)/(k+1) for small a.
  CHECK(in_D_minus(System::cubic(0.1, 0.1 * 0.9 / 3.0, 2.0)).inside);
}

TEST_CASE("verdict precedence") {
  CHECK(classify(System::cubic(0.52, 0.01, 2.0)).verdict ==
        RegionVerdict::PinnedGuaranteed);
  Classification neg = classify(System::cubic(0.2, 0.05, 2.0));
  CHECK(neg.verdict == RegionVerdict::NegativeSpeed);
  CHECK(neg.witness_A.has_value());
  Classification pos = classify(System::cubic(0.8, 0.05, 2.0));
  CHECK(pos.verdict == RegionVerdict::PositiveSpeed);
  CHECK(pos.witness_A.has_value());
  CHECK(classify(System::cubic(0.72, 0.8, 2.0)).verdict ==
        RegionVerdict::NegativeByLargeD);
  CHECK(classify(System::cubic(0.5, 0.2, 2.0)).verdict ==
        RegionVerdict::Unknown);
}

TEST_CASE("steady-state chaos threshold") {
  Nonlinearity cubic = Nonlinearity::cubic();
  CHECK(d_zero(cubic, 0.52, 2.0) == doctest::Approx(0.0192).epsilon(1e-12));
  CHECK(d_zero(cubic, 0.5, 1.0) == doctest::Approx(0.03125).epsilon(1e-12));
  // The certified bisection on the generic path must cover at least the
  // closed-form sufficient region and stay below the known failure point.
  double b = d_zero(cubic_as_custom(), 0.52, 2.0);
  CHECK(b >= 0.0192 - 1e-6);
  CHECK(b < 0.03);
}

TEST_CASE("asymptotic speed and its sign change") {
  CHECK(asymptotic_speed(0.72, 1.0, 2.0) ==
        doctest::Approx(std::sqrt(3.0) * 0.22 - 1.0).epsilon(1e-12));
  CHECK(std::abs(asymptotic_speed(0.72, 1.0, 2.0) + 0.6190) < 1e-3);
  CHECK(critical_d(0.72, 2.0) == doctest::Approx(0.1452).epsilon(1e-10));
  CHECK_THROWS_AS(critical_d(0.72, 1.0), std::domain_error);
}

TEST_CASE("boundary curve sampling") {
  CubicBoundary cb = cubic_boundaries(2.0, 101);
  REQUIRE(cb.a_grid.size() == 101);
  CHECK(cb.a_star_minus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cb.a_star_plus == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < cb.a_grid.size(); ++i) {
    double a = cb.a_grid[i];
    if (a <= 0.0 || a >= 1.0) continue;
    CHECK(cb.d_minus_curve[i] ==
          doctest::Approx((1.0 - a) * (1.0 - a) / 4.0).epsilon(1e-12));
    CHECK(cb.d_plus_curve[i] ==
          doctest::Approx(a * a / 8.0).epsilon(1e-12));
    if (a > cb.a_star_minus + 1e-9) {
      CHECK(std::isnan(cb.dminus_min_curve[i]));
      CHECK(std::isnan(cb.dminus_max_curve[i]));
    }
    if (a < cb.a_star_plus - 1e-9) {
      CHECK(std::isnan(cb.dplus_min_curve[i]));
      CHECK(std::isnan(cb.dplus_max_curve[i]));
    }
    CHECK(cb.d0_curve[i] > 0.0);
  }
  // No finite large-d threshold at k = 1.
  CubicBoundary cb1 = cubic_boundaries(1.0, 11);
  for (double v : cb1.d_star_curve) CHECK(std::isnan(v));
}
