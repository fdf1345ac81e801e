#include "treewave/chaos.hpp"

#include <cmath>
#include <stdexcept>

#include "treewave/banded.hpp"
#include "treewave/scan.hpp"

namespace treewave {

double PlanarMap::h(double v) const {
  return (sys.k + 1.0) * v - sys.g(v) / sys.d;
}

double PlanarMap::hv(double v) const {
  return (sys.k + 1.0) - sys.gv(v) / sys.d;
}

std::pair<double, double> PlanarMap::forward(double u, double v) const {
  return {(h(u) - v) / sys.k, u};
}

std::pair<double, double> PlanarMap::inverse(double u, double v) const {
  return {v, h(v) - sys.k * u};
}

PlanarMap make_map(const System& s) {
  s.validate();
  if (!(s.d > 0.0)) throw std::domain_error("d must be > 0 for the map");
  return PlanarMap{s};
}

std::optional<HdCertificate> check_Hd(const System& s) {
  s.validate();
  if (!(s.d > 0.0)) return std::nullopt;
  PlanarMap pm{s};
  auto h = [&](double v) { return pm.h(v); };
  auto hp = [&](double v) { return pm.hv(v); };
  const int N = 512;
  const double kp1 = s.k + 1.0;

  // First stationary point of h in (0,a). h'(0) > 0 under bistability, so
  // without a sign change h stays below h(a) = (k+1)a < k+1 and no hump
  // clears the bar.
  double y0 = -1.0;
  {
    double prev_v = 0.0, prev = hp(0.0);
    if (!(prev > 0.0)) return std::nullopt;
    for (int i = 1; i <= N; ++i) {
      double v = s.a * i / N;
      double cur = hp(v);
      if (prev > 0.0 && cur <= 0.0) {
        y0 = bisect_root(hp, prev_v, v);
        break;
      }
      prev_v = v;
      prev = cur;
    }
  }
  if (y0 < 0.0 || !(h(y0) > kp1)) return std::nullopt;

  // Last stationary point of h in (a,1); h must dip below zero there.
  double y1 = -1.0;
  {
    double prev_v = s.a, prev = hp(s.a);
    for (int i = 1; i <= N; ++i) {
      double v = s.a + (1.0 - s.a) * i / N;
      double cur = hp(v);
      if ((prev <= 0.0) != (cur <= 0.0)) y1 = bisect_root(hp, prev_v, v);
      prev_v = v;
      prev = cur;
    }
  }
  if (y1 < 0.0 || !(h(y1) < 0.0)) return std::nullopt;

  // Monotone flanks, sampled strictly inside (0,y0) and (y1,1).
  for (int j = 1; j < N; ++j) {
    if (!(hp(y0 * j / N) > 0.0)) return std::nullopt;
    if (!(hp(y1 + (1.0 - y1) * j / N) > 0.0)) return std::nullopt;
  }

  HdCertificate c;
  c.y0 = y0;
  c.y1 = y1;
  // h rises 0 -> h(y0) > k+1 on [0,y0] and h(y1) < 0 -> h(1) = k+1 on
  // [y1,1]; each level crossing below is unique on its flank.
  auto cross = [&](double target, double lo, double hi) {
    return bisect_root([&](double v) { return h(v) - target; }, lo, hi);
  };
  c.x1 = cross(1.0, 0.0, y0);
  c.x2 = cross(s.k, 0.0, y0);
  c.x3 = cross(kp1, 0.0, y0);
  c.z0 = cross(0.0, y1, 1.0);
  c.z1 = cross(1.0, y1, 1.0);
  c.z2 = cross(s.k, y1, 1.0);

  bool ordered = 0.0 < c.x1 && c.x3 < c.y0 && c.y0 < s.a && s.a < c.y1 &&
                 c.y1 < c.z0 && c.z2 < 1.0;
  if (s.k >= 1.0) {
    // Level targets 1 <= k <= k+1 order the crossings; ties at k = 1.
    const double tie = 1e-12;
    ordered = ordered && c.x1 <= c.x2 + tie && c.x2 <= c.x3 + tie &&
              c.z0 <= c.z1 + tie && c.z1 <= c.z2 + tie;
  }
  if (!ordered) return std::nullopt;
  return c;
}

bool Strips::in_U(int n, double p, double q, const PlanarMap& pm) const {
  const double tol = 1e-9;
  const double tolh = 1e-9 * (1.0 + k);
  if (p < -tol || p > 1.0 + tol) return false;
  if (n == 0) {
    if (q < -tol || q > cert.x3 + tol) return false;
  } else {
    if (q < cert.z0 - tol || q > 1.0 + tol) return false;
  }
  double hq = pm.h(q);
  return k * p <= hq + tolh && hq <= k * p + 1.0 + tolh;
}

bool Strips::in_V(int n, double p, double q, const PlanarMap& pm) const {
  const double tol = 1e-9;
  const double tolh = 1e-9 * (1.0 + k);
  if (q < -tol || q > 1.0 + tol) return false;
  if (n == 0) {
    if (p < -tol || p > cert.x3 + tol) return false;
  } else {
    if (p < cert.z0 - tol || p > 1.0 + tol) return false;
  }
  double hp_ = pm.h(p);
  return q <= hp_ + tolh && hp_ <= q + k + tolh;
}

Strips build_strips(const System& s, const HdCertificate& cert,
                    int samples_per_curve) {
  PlanarMap pm = make_map(s);
  int m = samples_per_curve < 2 ? 2 : samples_per_curve;
  Strips st;
  st.cert = cert;
  st.k = s.k;

  auto graph = [&](const std::string& name, double lo, double hi,
                   double shift) {
    Strips::Curve c;
    c.name = name;
    for (int j = 0; j < m; ++j) {
      double u = lo + (hi - lo) * j / (m - 1);
      c.pts.push_back({u, pm.h(u) - shift});
    }
    return c;
  };
  auto image = [&](const std::string& name, double lo, double hi,
                   double shift) {
    // Forward image of the graph curves: ((h(u) - shift*k ... ) expressed
    // directly as ((h(u) - shift)/k, u) with shift in {0, 1}.
    Strips::Curve c;
    c.name = name;
    for (int j = 0; j < m; ++j) {
      double u = lo + (hi - lo) * j / (m - 1);
      c.pts.push_back({(pm.h(u) - shift) / s.k, u});
    }
    return c;
  };

  st.curves.push_back(graph("u1", 0.0, cert.x1, 0.0));
  st.curves.push_back(graph("u2", cert.x2, cert.x3, s.k));
  st.curves.push_back(graph("u3", cert.z0, cert.z1, 0.0));
  st.curves.push_back(graph("u4", cert.z2, 1.0, s.k));
  st.curves.push_back(image("v1", 0.0, cert.x2, 0.0));
  st.curves.push_back(image("v2", cert.x1, cert.x3, 1.0));
  st.curves.push_back(image("v3", cert.z0, cert.z2, 0.0));
  st.curves.push_back(image("v4", cert.z1, 1.0, 1.0));

  const double tol = 1e-9;
  for (const auto& c : st.curves)
    for (const auto& p : c.pts)
      if (p[0] < -tol || p[0] > 1.0 + tol || p[1] < -tol || p[1] > 1.0 + tol)
        throw std::runtime_error("strip validation failed: curve " + c.name +
                                 " leaves the unit square");

  // Vertical boundaries must map onto the strip edges p = 0 and p = 1.
  auto edge_check = [&](const Strips::Curve& c, double shift, double edge) {
    for (const auto& p : c.pts) {
      auto [iu, iv] = pm.forward(p[0], pm.h(p[0]) - shift);
      (void)iv;
      if (std::abs(iu - edge) > 1e-12)
        throw std::runtime_error(
            "strip validation failed: boundary image off the edge for " +
            c.name);
    }
  };
  edge_check(st.curves[0], 0.0, 0.0);
  edge_check(st.curves[1], s.k, 1.0);
  edge_check(st.curves[2], 0.0, 0.0);
  edge_check(st.curves[3], s.k, 1.0);

  if (!(cert.x3 < cert.z0))
    throw std::runtime_error(
        "strip validation failed: vertical strips not disjoint");
  return st;
}

SymbolOrbit steady_state_from_word(const System& s,
                                   const std::vector<int>& word, int pad) {
  s.validate();
  if (!(s.d > 0.0)) throw std::domain_error("d must be > 0");
  if (word.empty()) throw std::invalid_argument("word must be non-empty");
  for (int sym : word)
    if (sym != 0 && sym != 1)
      throw std::invalid_argument("word symbols must be 0 or 1");
  if (pad < 5) pad = 5;

  SymbolOrbit orb;
  orb.word = word;
  orb.pad = pad;
  orb.symbols.assign(pad, word.front());
  orb.symbols.insert(orb.symbols.end(), word.begin(), word.end());
  orb.symbols.insert(orb.symbols.end(), pad, word.back());
  const int n = static_cast<int>(orb.symbols.size());
  const double left = word.front() == 0 ? 0.0 : 1.0;
  const double right = word.back() == 0 ? 0.0 : 1.0;

  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = 0.02 + 0.96 * orb.symbols[i];

  auto fill_residual = [&](const std::vector<double>& x,
                           std::vector<double>& F) {
    for (int i = 0; i < n; ++i) {
      double um = i > 0 ? x[i - 1] : left;
      double up = i < n - 1 ? x[i + 1] : right;
      F[i] = s.d * (um - (s.k + 1.0) * x[i] + s.k * up) + s.g(x[i]);
    }
  };
  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  std::vector<double> F(n), step(n);
  double norm = 0.0;
  int it = 0;
  for (; it < 50; ++it) {
    fill_residual(u, F);
    norm = inf_norm(F);
    if (norm < 1e-12) break;
    std::vector<double> dl(n - 1, s.d), du(n - 1, s.d * s.k), diag(n);
    for (int i = 0; i < n; ++i)
      diag[i] = -s.d * (s.k + 1.0) + s.gv(u[i]);
    step = F;
    solve_tridiag(dl, diag, du, step);  // J*step = F, so u <- u - step
    double lambda = 1.0;
    std::vector<double> trial(n), Ft(n);
    for (int halve = 0; halve <= 8; ++halve) {
      for (int i = 0; i < n; ++i) trial[i] = u[i] - lambda * step[i];
      fill_residual(trial, Ft);
      if (inf_norm(Ft) < norm || halve == 8) {
        u = trial;
        break;
      }
      lambda *= 0.5;
    }
  }
  fill_residual(u, F);
  orb.values = u;
  orb.residual_norm = inf_norm(F);
  orb.newton_iters = it;
  orb.converged = orb.residual_norm < 1e-12;

  orb.membership_ok = true;
  for (int i = 0; i < n; ++i) {
    bool ok = orb.symbols[i] == 0
                  ? (u[i] >= -1e-9 && u[i] < s.a)
                  : (u[i] > s.a && u[i] <= 1.0 + 1e-9);
    if (!ok) {
      orb.membership_ok = false;
      break;
    }
  }
  return orb;
}

bool orbit_shadowing_check(const PlanarMap& pm, const SymbolOrbit& orbit,
                           const Strips* strips, double tol) {
  const auto& u = orbit.values;
  const int n = static_cast<int>(u.size());
  if (n < 3) return false;
  for (int i = 1; i + 1 < n; ++i) {
    auto [fu, fv] = pm.forward(u[i], u[i - 1]);
    if (std::abs(fu - u[i + 1]) > tol || std::abs(fv - u[i]) > tol)
      return false;
  }
  if (strips) {
    // Orbit point (u_{i+1}, u_i): the strip index follows the symbol of the
    // second coordinate.
    for (int i = 0; i + 1 < n; ++i)
      if (!strips->in_U(orbit.symbols[i], u[i + 1], u[i], pm)) return false;
  }
  return true;
}

}  // namespace treewave
