#include "treewave/nonlinearity.hpp"

#include <cmath>
#include <utility>

namespace treewave {
namespace {

double cubic_g(double v, double a) { return v * (1.0 - v) * (v - a); }
double cubic_gv(double v, double a) {
  return -3.0 * v * v + 2.0 * (1.0 + a) * v - a;
}
double cubic_gvv(double v, double a) { return -6.0 * v + 2.0 * (1.0 + a); }
double cubic_ga(double v, double /*a*/) { return -v * (1.0 - v); }

}  // namespace

double Nonlinearity::g(double v, double a) const {
  return kind == Kind::Cubic ? cubic_g(v, a) : g_fn(v, a);
}
double Nonlinearity::gv(double v, double a) const {
  return kind == Kind::Cubic ? cubic_gv(v, a) : gv_fn(v, a);
}
double Nonlinearity::gvv(double v, double a) const {
  return kind == Kind::Cubic ? cubic_gvv(v, a) : gvv_fn(v, a);
}
double Nonlinearity::ga(double v, double a) const {
  return kind == Kind::Cubic ? cubic_ga(v, a) : ga_fn(v, a);
}

Nonlinearity Nonlinearity::cubic() {
  Nonlinearity nl;
  nl.kind = Kind::Cubic;
  nl.name = "cubic";
  return nl;
}

Nonlinearity Nonlinearity::custom(std::string name, Fn g, Fn gv, Fn gvv,
                                  Fn ga) {
  Nonlinearity nl;
  nl.kind = Kind::Custom;
  nl.name = std::move(name);
  nl.g_fn = std::move(g);
  nl.gv_fn = std::move(gv);
  nl.gvv_fn = std::move(gvv);
  nl.ga_fn = std::move(ga);
  return nl;
}

System System::cubic(double a, double d, double k) {
  System s{Nonlinearity::cubic(), a, d, k};
  s.validate();
  return s;
}

System System::custom(Nonlinearity nl, double a, double d, double k) {
  System s{std::move(nl), a, d, k};
  s.validate();
  return s;
}

void System::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("a must lie in (0,1)");
  if (!(d >= 0.0)) throw std::domain_error("d must be >= 0");
  if (!(k > 0.0)) throw std::domain_error("k must be > 0");
}

System reflect(const System& s) {
  System r;
  r.a = 1.0 - s.a;
  r.d = s.d * s.k;
  r.k = 1.0 / s.k;
  if (s.nl.kind == Nonlinearity::Kind::Cubic) {
    // v(1-v)(v-a) maps to itself under v -> 1-v, a -> 1-a, up to the sign
    // the transform already carries, so the reflected system is plain cubic.
    r.nl = Nonlinearity::cubic();
    return r;
  }
  Nonlinearity base = s.nl;
  r.nl = Nonlinearity::custom(
      base.name + "-reflected",
      [base](double v, double b) { return -base.g(1.0 - v, 1.0 - b); },
      [base](double v, double b) { return base.gv(1.0 - v, 1.0 - b); },
      [base](double v, double b) { return -base.gvv(1.0 - v, 1.0 - b); },
      [base](double v, double b) { return base.ga(1.0 - v, 1.0 - b); });
  return r;
}

namespace {

// The grid stays strictly interior in both v and a; endpoint behaviour is
// checked separately where the hypotheses pin exact values.
HypothesisCheck check_hg(const Nonlinearity& nl, int n, double tol) {
  HypothesisCheck out;
  for (int ia = 1; ia < n; ++ia) {
    double a = static_cast<double>(ia) / n;
    if (std::abs(nl.g(0.0, a)) > tol || std::abs(nl.g(a, a)) > tol ||
        std::abs(nl.g(1.0, a)) > tol) {
      out = {false, nl.g(0.0, a) != 0.0 ? 0.0 : a, a, "zero condition fails"};
      return out;
    }
    if (!(nl.gv(0.0, a) < 0.0 && nl.gv(a, a) > 0.0 && nl.gv(1.0, a) < 0.0)) {
      out = {false, 0.0, a, "slope signs at equilibria fail"};
      return out;
    }
    for (int iv = 1; iv < n; ++iv) {
      double v = static_cast<double>(iv) / n;
      if (std::abs(v - a) * n < 0.5) continue;  // skip the middle zero
      double gv = nl.g(v, a);
      bool want_neg = v < a;
      if ((want_neg && gv >= tol) || (!want_neg && v < 1.0 && gv <= -tol)) {
        out = {false, v, a, "sign pattern fails"};
        return out;
      }
    }
  }
  return out;
}

HypothesisCheck check_hg1(const Nonlinearity& nl, int n, double tol) {
  HypothesisCheck out;
  for (int iv = 1; iv < n; ++iv) {
    double v = static_cast<double>(iv) / n;
    if (nl.g(v, 0.0) < -tol) {
      out = {false, v, 0.0, "g(.;0) dips negative"};
      return out;
    }
    if (nl.g(v, 1.0) > tol) {
      out = {false, v, 1.0, "g(.;1) rises positive"};
      return out;
    }
    for (int ia = 1; ia < n; ++ia) {
      double a = static_cast<double>(ia) / n;
      if (nl.ga(v, a) >= tol) {
        out = {false, v, a, "da g not negative"};
        return out;
      }
    }
  }
  return out;
}

HypothesisCheck check_hg2(const Nonlinearity& nl, int n, double tol) {
  // Convex-then-concave in v at the parameter endpoints: one sign change of
  // g'' as v sweeps (0,1), convex first.
  HypothesisCheck out;
  for (double a : {0.0, 1.0}) {
    int sign = +1;
    int flips = 0;
    for (int iv = 1; iv < n; ++iv) {
      double v = static_cast<double>(iv) / n;
      double s = nl.gvv(v, a);
      if (sign > 0 && s < -tol) {
        sign = -1;
        ++flips;
      } else if (sign < 0 && s > tol) {
        out = {false, v, a, "second derivative turns back up"};
        return out;
      }
    }
    if (flips != 1) {
      out = {false, 1.0, a, "expected exactly one convexity switch"};
      return out;
    }
  }
  return out;
}

}  // namespace

HypothesisReport check_hypotheses(const Nonlinearity& nl,
                                  int grid_resolution) {
  int n = grid_resolution < 100 ? 100 : grid_resolution;
  double tol = nl.kind == Nonlinearity::Kind::Cubic ? 1e-12 : 1e-8;
  HypothesisReport rep;
  rep.hg = check_hg(nl, n, tol);
  rep.hg1 = check_hg1(nl, n, tol);
  rep.hg2 = check_hg2(nl, n, tol);
  return rep;
}

std::optional<Nonlinearity> nonlinearity_registry(const std::string& name) {
  if (name == "cubic") return Nonlinearity::cubic();
  if (name == "cubic5") {
    // Quintic rescaling of the cubic: same zeros, steeper shoulders. Used to
    // exercise the generic (scan based) code paths against a non-cubic g.
    auto g = [](double v, double a) {
      double c = v * (1.0 - v) * (v - a);
      return c * (1.0 + v * (1.0 - v));
    };
    auto gv = [](double v, double a) {
      double c = v * (1.0 - v) * (v - a);
      double cv = -3.0 * v * v + 2.0 * (1.0 + a) * v - a;
      double w = 1.0 + v * (1.0 - v);
      double wv = 1.0 - 2.0 * v;
      return cv * w + c * wv;
    };
    auto gvv = [](double v, double a) {
      double c = v * (1.0 - v) * (v - a);
      double cv = -3.0 * v * v + 2.0 * (1.0 + a) * v - a;
      double cvv = -6.0 * v + 2.0 * (1.0 + a);
      double w = 1.0 + v * (1.0 - v);
      double wv = 1.0 - 2.0 * v;
      return cvv * w + 2.0 * cv * wv + c * (-2.0);
    };
    auto ga = [](double v, double /*a*/) {
      return -v * (1.0 - v) * (1.0 + v * (1.0 - v));
    };
    return Nonlinearity::custom("cubic5", g, gv, gvv, ga);
  }
  return std::nullopt;
}

}  // namespace treewave
