#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "treewave/nonlinearity.hpp"

using namespace treewave;

TEST_CASE("cubic point values and derivatives") {
  Nonlinearity nl = Nonlinearity::cubic();
  CHECK(nl.g(0.75, 0.25) == doctest::Approx(0.09375).epsilon(1e-15));
  for (double a : {0.1, 0.52, 0.9}) {
    CHECK(nl.g(0.0, a) == 0.0);
    CHECK(nl.g(a, a) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(nl.g(1.0, a) == 0.0);
    CHECK(nl.gv(0.0, a) == doctest::Approx(-a).epsilon(1e-15));
    CHECK(nl.gv(1.0, a) == doctest::Approx(a - 1.0).epsilon(1e-15));
    CHECK(nl.gv(a, a) == doctest::Approx(a - a * a).epsilon(1e-13));
    // Inflection at (a+1)/3.
    CHECK(nl.gvv((a + 1.0) / 3.0, a) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(nl.ga(0.3, a) == doctest::Approx(-0.3 * 0.7).epsilon(1e-15));
  }
}

TEST_CASE("analytic derivatives agree with finite differences") {
  const double h = 1e-6;
  for (const char* name : {"cubic", "cubic5"}) {
    auto nl = nonlinearity_registry(name);
    REQUIRE(nl.has_value());
    for (double a : {0.2, 0.5, 0.8}) {
      for (int iv = 1; iv < 20; ++iv) {
        double v = static_cast<double>(iv) / 20.0;
        double fd_gv = (nl->g(v + h, a) - nl->g(v - h, a)) / (2.0 * h);
        double fd_gvv = (nl->gv(v + h, a) - nl->gv(v - h, a)) / (2.0 * h);
        double fd_ga = (nl->g(v, a + h) - nl->g(v, a - h)) / (2.0 * h);
        CHECK(nl->gv(v, a) == doctest::Approx(fd_gv).epsilon(1e-8));
        CHECK(nl->gvv(v, a) == doctest::Approx(fd_gvv).epsilon(1e-8));
        CHECK(nl->ga(v, a) == doctest::Approx(fd_ga).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("system validation messages") {
  CHECK_THROWS_WITH_AS(System::cubic(1.5, 0.1, 2.0), "a must lie in (0,1)",
                       std::domain_error);
  CHECK_THROWS_WITH_AS(System::cubic(0.0, 0.1, 2.0), "a must lie in (0,1)",
                       std::domain_error);
  CHECK_THROWS_WITH_AS(System::cubic(0.5, -0.1, 2.0), "d must be >= 0",
                       std::domain_error);
  CHECK_THROWS_WITH_AS(System::cubic(0.5, 0.1, 0.0), "k must be > 0",
                       std::domain_error);
  CHECK_NOTHROW(System::cubic(0.5, 0.0, 2.0));  // d = 0 is tolerated
}

TEST_CASE("reflection maps parameters and values") {
  System s = System::cubic(0.3, 0.1, 2.0);
  System r = reflect(s);
  CHECK(r.a == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(r.d == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.k == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.nl.kind == Nonlinearity::Kind::Cubic);
  for (int i = -4; i <= 24; ++i) {
    double v = static_cast<double>(i) / 20.0;
    CHECK(r.g(v) == doctest::Approx(-s.g(1.0 - v)).epsilon(1e-13));
  }

  System rr = reflect(r);
  CHECK(rr.a == doctest::Approx(s.a).epsilon(1e-15));
  CHECK(rr.d == doctest::Approx(s.d).epsilon(1e-15));
  CHECK(rr.k == doctest::Approx(s.k).epsilon(1e-15));
}

TEST_CASE("reflection of a custom family uses the chain rules") {
  auto quintic = nonlinearity_registry("cubic5");
  REQUIRE(quintic.has_value());
  System s = System::custom(*quintic, 0.35, 0.05, 3.0);
  System r = reflect(s);
  CHECK(r.nl.kind == Nonlinearity::Kind::Custom);
  for (int i = 1; i < 20; ++i) {
    double v = static_cast<double>(i) / 20.0;
    CHECK(r.g(v) == doctest::Approx(-s.nl.g(1.0 - v, 1.0 - r.a)).epsilon(1e-14));
    CHECK(r.gv(v) == doctest::Approx(s.nl.gv(1.0 - v, 1.0 - r.a)).epsilon(1e-14));
    CHECK(r.gvv(v) ==
          doctest::Approx(-s.nl.gvv(1.0 - v, 1.0 - r.a)).epsilon(1e-14));
    CHECK(r.ga(v) == doctest::Approx(s.nl.ga(1.0 - v, 1.0 - r.a)).epsilon(1e-14));
  }
}

TEST_CASE("bistability hypotheses hold for the built-in families") {
  for (const char* name : {"cubic", "cubic5"}) {
    auto nl = nonlinearity_registry(name);
    REQUIRE(nl.has_value());
    HypothesisReport rep = check_hypotheses(*nl);
    CHECK(rep.hg.pass);
    CHECK(rep.hg1.pass);
    CHECK(rep.hg2.pass);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("hypothesis check flags a broken family") {
  // Constant slope up: no bistable sign pattern.
  Nonlinearity bad = Nonlinearity::custom(
      "linear", [](double v, double) { return v; },
      [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; });
  HypothesisReport rep = check_hypotheses(bad);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("registry lookups") {
  CHECK(nonlinearity_registry("cubic").has_value());
  CHECK(nonlinearity_registry("cubic5").has_value());
  CHECK_FALSE(nonlinearity_registry("unknown").has_value());
}
