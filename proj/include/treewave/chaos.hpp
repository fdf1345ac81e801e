#pragma once
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treewave/nonlinearity.hpp"

namespace treewave {

// Pinned steady states as orbits of a planar map. Writing the steady
// equation d(u_{i-1} - (k+1)u_i + k u_{i+1}) + g(u_i;a) = 0 as a recursion
// in (u_i, u_{i-1}) gives the map below; horseshoe strips for it certify a
// steady state for every {0,1} symbol sequence.
struct PlanarMap {
  System sys;

  // h(v) = (k+1)v - g(v;a)/d, the backbone of both the map and the strips.
  double h(double v) const;
  double hv(double v) const;

  // (u,v) -> ((h(u) - v)/k, u); iterating generates (u_{i+1}, u_i).
  std::pair<double, double> forward(double u, double v) const;
  // Algebraic inverse (v~, h(v~) - k u~); equals R_k forward R_k with
  // R_k(u,v) = (v, k u).
  std::pair<double, double> inverse(double u, double v) const;
};

// Throws std::domain_error when d <= 0 (the map divides by d).
PlanarMap make_map(const System& s);

// Certificate that h is steep enough for the horseshoe: a hump above k+1
// left of a, a dip below 0 right of a, monotone approaches, and the eight
// special level crossings in the stated order.
struct HdCertificate {
  double y0 = 0.0, y1 = 0.0;       // hump top in (0,a), dip bottom in (a,1)
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;  // h = 1, k, k+1 on (0, y0)
  double z0 = 0.0, z1 = 0.0, z2 = 0.0;  // h = 0, 1, k on (y1, 1)
};

// Deterministic search: first stationary point of h in (0,a) must clear
// k+1, last stationary point in (a,1) must drop below 0; special points by
// bisection on the monotone flanks. Absence is a valid outcome (none).
std::optional<HdCertificate> check_Hd(const System& s);

// Sampled strip boundary curves: u1..u4 vertical (graphs over u of h and
// h - k on the flank intervals), v1..v4 horizontal (their forward images).
struct Strips {
  struct Curve {
    std::string name;
    std::vector<std::array<double, 2>> pts;  // (u, v) samples
  };
  HdCertificate cert;
  double k = 2.0;
  std::vector<Curve> curves;

  // Membership with tolerance 1e-9, n in {0,1}.
  bool in_U(int n, double p, double q, const PlanarMap& pm) const;
  bool in_V(int n, double p, double q, const PlanarMap& pm) const;
};

// Builds and numerically validates the strips: boundary curves stay inside
// [0,1]^2, forward images of the vertical boundaries land on the strip
// edges p = 0 and p = 1, and the vertical strips are disjoint (x3 < z0).
// Validation failure throws std::runtime_error.
Strips build_strips(const System& s, const HdCertificate& cert,
                    int samples_per_curve = 200);

// Steady state assembled from a finite {0,1} word with constant tails.
struct SymbolOrbit {
  std::vector<int> word;
  int pad = 8;              // tail copies on each side
  std::vector<int> symbols;     // padded, length word.size() + 2*pad
  std::vector<double> values;   // same indexing as symbols
  double residual_norm = 0.0;
  int newton_iters = 0;
  bool converged = false;
  bool membership_ok = false;   // values fall in [0,a) / (a,1] per symbol
};

// Damped Newton on the steady equation with Dirichlet tail clamps at the
// equilibria matching the tail symbols; guess 0.02 + 0.96*s_i.
SymbolOrbit steady_state_from_word(const System& s,
                                   const std::vector<int>& word, int pad = 8);

// Checks the orbit shadows the map: forward(u_i, u_{i-1}) = (u_{i+1}, u_i)
// to tol across the window, and (u_{i+1}, u_i) lands in U_{s_i} when strips
// are supplied (the strip index follows the second coordinate's symbol).
bool orbit_shadowing_check(const PlanarMap& pm, const SymbolOrbit& orbit,
                           const Strips* strips = nullptr, double tol = 1e-9);

}  // namespace treewave
