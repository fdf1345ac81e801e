#include "treewave/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "treewave/regions.hpp"
#include "treewave/scan.hpp"

namespace treewave {
namespace {

double quintic_smoothstep(double t) {
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double quintic_smoothstep_deriv(double t) {
  double r = t * (1.0 - t);
  return 30.0 * r * r;
}

}  // namespace

double delta_k(const std::function<double(double)>& phi, double k, double xi) {
  // Difference form so constant profiles annihilate exactly for any k.
  double mid = phi(xi);
  return (phi(xi - 1.0) - mid) + k * (phi(xi + 1.0) - mid);
}

double residual_at(const System& s, const CertificateProfile& psi, double c,
                   double xi) {
  double coupling = delta_k(psi.value, s.k, xi);
  return -c * psi.deriv(xi) - s.d * coupling - s.g(psi.value(xi));
}

ResidualScan residual_op(const System& s, double c,
                         const CertificateProfile& psi,
                         const std::vector<double>& xi_grid) {
  ResidualScan scan;
  scan.values.reserve(xi_grid.size());
  scan.max_value = -std::numeric_limits<double>::infinity();
  for (double xi : xi_grid) {
    double v = residual_at(s, psi, c, xi);
    scan.values.push_back(v);
    if (v > scan.max_value) {
      scan.max_value = v;
      scan.arg_max = xi;
    }
  }
  return scan;
}

double kappa_tail(double l, double A, double xi) {
  return A * (1.0 - std::pow(l, -xi));
}

double kappa_delta_closed_form(double l, double A, double k, double xi) {
  return A * std::pow(l, -xi) * (k - l) * (1.0 - 1.0 / l);
}

Certificate build_steep(const System& s, double A, double xi0, double xi1) {
  s.validate();
  double width = xi1 - xi0;
  if (!(width > 0.0 && width < 1.0))
    throw std::invalid_argument("the ramp must satisfy 0 < xi1 - xi0 < 1");
  if (!(A > s.a && A < 1.0))
    throw std::invalid_argument("the plateau level must lie in (a, 1)");

  double slack = j_minus(s.nl, s.a, s.d, A, s.k);
  double tol = 1e-12 * std::max(1.0, s.d);
  if (!(slack < -tol)) {
    std::ostringstream msg;
    msg << "steep certificate unavailable: slack " << slack
        << " is not negative at plateau " << A;
    throw certificate_unavailable(msg.str());
  }

  Certificate cert;
  cert.family = "steep";
  cert.A = A;
  cert.xi0 = xi0;
  cert.xi1 = xi1;
  cert.epsilon = -slack;
  double max_slope = (15.0 / 8.0) * A / width;
  cert.cbar = -0.99 * cert.epsilon / max_slope;
  cert.psi.active_lo = xi0;
  cert.psi.active_hi = xi1;
  cert.psi.value = [A, xi0, xi1, width](double xi) {
    if (xi <= xi0) return 0.0;
    if (xi >= xi1) return A;
    return A * quintic_smoothstep((xi - xi0) / width);
  };
  cert.psi.deriv = [A, xi0, xi1, width](double xi) {
    if (xi <= xi0 || xi >= xi1) return 0.0;
    return A * quintic_smoothstep_deriv((xi - xi0) / width) / width;
  };
  return cert;
}

double d_star_wide(const System& s, double l, double A) {
  s.validate();
  if (!(s.k > 1.0))
    throw std::invalid_argument("the wide family needs k > 1");
  if (!(l > 1.0 && l < s.k))
    throw std::invalid_argument("the decay base must lie in (1, k)");
  if (!(A >= s.a && A < 1.0))
    throw std::invalid_argument("the plateau level must lie in [a, 1)");
  auto f = [&](double sigma) {
    if (!(sigma > 0.0)) return 0.0;
    return -s.g(A * (1.0 - sigma)) / (A * sigma);
  };
  MaxResult r = max_scan(f, 1.0 - s.a / A, 1.0);
  double prefactor = (s.k - l) * (1.0 - 1.0 / l);
  return std::max(r.value, 0.0) / prefactor;
}

CertificateProfile wide_profile(double l, double A) {
  if (!(l > 1.0)) throw std::invalid_argument("the decay base must exceed 1");
  if (!(A > 0.0 && A < 1.0))
    throw std::invalid_argument("the plateau level must lie in (0, 1)");
  double L = std::log(l);
  double joint = -1.0 - 1.0 / l;
  double floor_value = A * (1.0 - l - L / 3.0);
  CertificateProfile psi;
  psi.active_lo = joint - 1.0;  // one shift of margin into the flat piece
  psi.active_hi = 0.0;
  psi.value = [=](double xi) {
    if (xi <= joint) return floor_value;
    if (xi <= -1.0) {
      double w = l * xi + 1.0 + l;
      return A * ((L / 3.0) * w * w * w + 1.0 - l - L / 3.0);
    }
    return A * (1.0 - std::pow(l, -xi));
  };
  psi.deriv = [=](double xi) {
    if (xi <= joint) return 0.0;
    if (xi <= -1.0) {
      double w = l * xi + 1.0 + l;
      return A * L * l * w * w;
    }
    return A * L * std::pow(l, -xi);
  };
  return psi;
}

Certificate build_wide(const System& s, double l, double A) {
  double dsl = d_star_wide(s, l, A);  // validates s, l, A
  double prefactor = (s.k - l) * (1.0 - 1.0 / l);
  if (!(s.d > dsl)) {
    std::ostringstream msg;
    msg << "wide certificate unavailable: d = " << s.d
        << " does not exceed the family threshold " << dsl;
    throw certificate_unavailable(msg.str());
  }

  Certificate cert;
  cert.family = "wide";
  cert.A = A;
  cert.l = l;
  cert.epsilon = (s.d - dsl) * prefactor;
  cert.psi = wide_profile(l, A);

  // inf of the coupling term over the open interval (-1-1/l, 0), scanned on
  // the closed interval shrunk by 1e-9 at each end.
  double lo = -1.0 - 1.0 / l + 1e-9;
  double hi = 0.0 - 1e-9;
  auto neg_coupling = [&](double xi) { return -delta_k(cert.psi.value, s.k, xi); };
  MaxResult r = max_scan(neg_coupling, lo, hi, 4096);
  cert.C = -r.value;

  double L = std::log(l);
  double cand1 = -cert.epsilon / L;
  double cand2 = -cert.epsilon * cert.C / (A * prefactor * l * L);
  cert.cbar = 0.99 * std::max(cand1, cand2);
  return cert;
}

VerifyReport verify_certificate(const System& s, double cbar,
                                const CertificateProfile& psi, double lo,
                                double hi, std::size_t n_points) {
  s.validate();
  if (!(hi > lo)) throw std::invalid_argument("empty verification range");
  n_points = std::max<std::size_t>(n_points, 10000);

  VerifyReport rep;
  double prev_max = std::numeric_limits<double>::infinity();
  std::size_t n = n_points;
  for (;;) {
    double best = -std::numeric_limits<double>::infinity();
    double best_xi = lo;
    for (std::size_t i = 0; i < n; ++i) {
      double xi = lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(n - 1);
      double v = residual_at(s, psi, cbar, xi);
      if (v > best) {
        best = v;
        best_xi = xi;
      }
    }
    rep.max_residual = best;
    rep.arg_max = best_xi;
    rep.n_points = n;
    if (std::abs(best - prev_max) < 1e-12 || n >= 1000000) break;
    prev_max = best;
    n *= 2;
  }
  rep.pass = rep.max_residual <= 1e-10;
  return rep;
}

VerifyReport verify_certificate(const System& s, const Certificate& cert,
                                std::size_t n_points) {
  return verify_certificate(s, cert.cbar, cert.psi, cert.psi.active_lo - 2.0,
                            cert.psi.active_hi + 2.0, n_points);
}

WideProfileChecks verify_psi_delta_props(double l, double A, double k) {
  if (!(l > 1.0 && l < k))
    throw std::invalid_argument("the decay base must lie in (1, k)");
  if (!(A > 0.0 && A < 1.0))
    throw std::invalid_argument("the plateau level must lie in (0, 1)");

  CertificateProfile psi = wide_profile(l, A);
  double L = std::log(l);
  double joint = -1.0 - 1.0 / l;
  double floor_value = A * (1.0 - l - L / 3.0);
  auto cubic_piece = [&](double xi) {
    double w = l * xi + 1.0 + l;
    return A * ((L / 3.0) * w * w * w + 1.0 - l - L / 3.0);
  };
  auto cubic_slope = [&](double xi) {
    double w = l * xi + 1.0 + l;
    return A * L * l * w * w;
  };
  auto kappa = [&](double xi) { return kappa_tail(l, A, xi); };
  auto kappa_slope = [&](double xi) { return A * L * std::pow(l, -xi); };
  auto dk_psi = [&](double xi) { return delta_k(psi.value, k, xi); };

  WideProfileChecks checks;

  // One-sided formulas evaluated at the joints themselves.
  checks.c1_joints =
      std::abs(cubic_piece(joint) - floor_value) <= 1e-12 &&
      std::abs(cubic_slope(joint)) <= 1e-12 &&
      std::abs(cubic_piece(-1.0) - kappa(-1.0)) <= 1e-12 &&
      std::abs(cubic_slope(-1.0) - kappa_slope(-1.0)) <= 1e-12;

  checks.flat_far_left = true;
  for (int i = 0; i <= 256; ++i) {
    double xi = (joint - 1.0) - 3.0 * static_cast<double>(i) / 256.0;
    if (std::abs(dk_psi(xi)) > 1e-12) {
      checks.flat_far_left = false;
      break;
    }
  }

  // Strict increase, sampled away from the flat left endpoint where the
  // cubic piece grows below floating-point resolution.
  {
    double lo = joint - 1.0 + (1.0 / l) / 100.0;
    double hi = joint;
    checks.increasing_ramp = true;
    double prev = dk_psi(lo);
    for (int i = 1; i <= 128; ++i) {
      double xi = lo + (hi - lo) * static_cast<double>(i) / 128.0;
      double cur = dk_psi(xi);
      if (!(cur > prev)) {
        checks.increasing_ramp = false;
        break;
      }
      prev = cur;
    }
  }

  {
    double lo = joint + 1e-6, hi = -1.0 - 1e-6;
    double h = (hi - lo) / 128.0;
    checks.concave_mid = true;
    for (int i = 1; i < 128; ++i) {
      double xi = lo + h * static_cast<double>(i);
      double second = dk_psi(xi - h) - 2.0 * dk_psi(xi) + dk_psi(xi + h);
      if (second > 1e-10) {
        checks.concave_mid = false;
        break;
      }
    }
  }

  checks.dominates_kappa = true;
  for (int i = 0; i <= 128; ++i) {
    double xi = -1.0 + (1.0 - 1.0 / 130.0) * static_cast<double>(i) / 128.0;
    double dk_kappa = kappa_delta_closed_form(l, A, k, xi);
    if (!(dk_psi(xi) > dk_kappa)) {
      checks.dominates_kappa = false;
      break;
    }
  }

  checks.matches_kappa = true;
  for (int i = 0; i <= 256; ++i) {
    double xi = 3.0 * static_cast<double>(i) / 256.0;
    double dk_kappa = delta_k(kappa, k, xi);
    if (std::abs(dk_psi(xi) - dk_kappa) > 1e-12) {
      checks.matches_kappa = false;
      break;
    }
  }

  return checks;
}

}  // namespace treewave
