#pragma once
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treewave/nonlinearity.hpp"

namespace treewave {

// Sub-solution speed certificates. A profile Psi with
// I[cbar, Psi](xi) = -cbar Psi'(xi) - d Delta_k[Psi](xi) - g(Psi(xi)) <= 0
// everywhere, lying below a translate of the travelling front, forces the
// front speed c <= cbar; cbar < 0 then certifies inward motion without
// solving the wave equation.

// Thrown when the requested parameters admit no certificate of the family
// (slack nonpositive, or d at or below the family threshold).
class certificate_unavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Delta_k[phi](xi) = phi(xi-1) - (k+1) phi(xi) + k phi(xi+1).
double delta_k(const std::function<double(double)>& phi, double k, double xi);

struct CertificateProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  // Outside [active_lo, active_hi] the profile is constant (left) or a pure
  // exponential tail already covered by the bound (right).
  double active_lo = 0.0;
  double active_hi = 0.0;
};

// Pointwise residual I[c, psi](xi).
double residual_at(const System& s, const CertificateProfile& psi, double c,
                   double xi);

struct ResidualScan {
  std::vector<double> values;
  double max_value = 0.0;
  double arg_max = 0.0;
};

ResidualScan residual_op(const System& s, double c,
                         const CertificateProfile& psi,
                         const std::vector<double>& xi_grid);

struct Certificate {
  std::string family;   // "steep" or "wide"
  double cbar = 0.0;    // certified upper bound for the wave speed
  double epsilon = 0.0; // slack feeding the bound
  double A = 0.0;       // plateau level
  double l = 0.0;       // decay base (wide only)
  double C = 0.0;       // coupling infimum (wide only)
  double xi0 = 0.0, xi1 = 0.0;  // ramp window (steep only)
  CertificateProfile psi;
};

// Quintic-ramp profile 0 -> A over (xi0, xi1) with 0 < xi1 - xi0 < 1.
// Succeeds when the slack functional is negative at plateau A, i.e. the
// parameters sit in the negative-speed region with witness A; otherwise
// throws certificate_unavailable.
Certificate build_steep(const System& s, double A, double xi0, double xi1);

// Wide profile following kappa(xi) = A (1 - l^{-xi}) for xi > -1, a cubic
// C^1 shim on (-1-1/l, -1], constant A(1-l-log(l)/3) to the left. Requires
// k > 1, l in (1, k), A in [a, 1); throws certificate_unavailable when
// d <= d_star_wide(s, l, A).
Certificate build_wide(const System& s, double l, double A);

// Family threshold: max_{sigma in [1-a/A, 1]} -g(A(1-sigma)) / (A sigma)
// scaled by 1 / ((k-l)(1-1/l)).
double d_star_wide(const System& s, double l, double A);

struct VerifyReport {
  bool pass = false;
  double max_residual = 0.0;
  double arg_max = 0.0;
  std::size_t n_points = 0;
};

// Grid check of I[cbar, psi] over [lo, hi], refined by doubling until the
// max moves less than 1e-12 or the grid hits 1e6 points; passes when the
// max stays at or below 1e-10. A numerical certificate, not a proof.
VerifyReport verify_certificate(const System& s, double cbar,
                                const CertificateProfile& psi, double lo,
                                double hi, std::size_t n_points = 10000);
// Convenience: the certificate's own active range plus a 2-shift margin.
VerifyReport verify_certificate(const System& s, const Certificate& cert,
                                std::size_t n_points = 10000);

struct WideProfileChecks {
  bool c1_joints = false;       // value/slope agree at both joints to 1e-12
  bool flat_far_left = false;   // Delta_k vanishes for xi <= -2 - 1/l
  bool increasing_ramp = false; // strictly increasing on (-2-1/l, -1-1/l]
  bool concave_mid = false;     // concave on (-1-1/l, -1)
  bool dominates_kappa = false; // Delta_k[psi] > Delta_k[kappa] on [-1, 0)
  bool matches_kappa = false;   // equality for xi >= 0 within 1e-12
  bool all() const {
    return c1_joints && flat_far_left && increasing_ramp && concave_mid &&
           dominates_kappa && matches_kappa;
  }
};

// Structural checks of the wide profile's coupling term, piece by piece,
// on dense grids. Requires l in (1, k) and A in (0, 1).
WideProfileChecks verify_psi_delta_props(double l, double A, double k);

// The wide profile alone (no slack computation), for structural tests.
CertificateProfile wide_profile(double l, double A);

// The pure tail kappa and the closed form of its coupling term, kept public
// for cross-checks: Delta_k[kappa](xi) = A l^{-xi} (k-l)(1-1/l) exactly.
double kappa_tail(double l, double A, double xi);
double kappa_delta_closed_form(double l, double A, double k, double xi);

}  // namespace treewave
