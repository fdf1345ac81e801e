#pragma once
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace treewave {

// Bistable nonlinearity g(v; a) with zeros at 0, a, 1. The cubic kind
// evaluates v(1-v)(v-a) and its derivatives in closed form; custom kinds
// carry user-supplied evaluators, including analytic derivatives (there is
// no automatic differentiation here: Newton Jacobians and the slope
// thresholds need a trustworthy g').
struct Nonlinearity {
  enum class Kind { Cubic, Custom };

  using Fn = std::function<double(double v, double a)>;

  Kind kind = Kind::Cubic;
  std::string name = "cubic";
  Fn g_fn, gv_fn, gvv_fn, ga_fn;

  double g(double v, double a) const;
  double gv(double v, double a) const;   // dg/dv
  double gvv(double v, double a) const;  // d2g/dv2
  double ga(double v, double a) const;   // dg/da

  static Nonlinearity cubic();
  static Nonlinearity custom(std::string name, Fn g, Fn gv, Fn gvv, Fn ga);
};

// Parameter triple plus nonlinearity. k is real-valued; integer k models the
// k-ary tree. d = 0 is tolerated at this level (some thresholds are defined
// there); operations that divide by d enforce positivity themselves.
struct System {
  Nonlinearity nl;
  double a = 0.5;
  double d = 0.1;
  double k = 2.0;

  double g(double v) const { return nl.g(v, a); }
  double gv(double v) const { return nl.gv(v, a); }
  double gvv(double v) const { return nl.gvv(v, a); }
  double ga(double v) const { return nl.ga(v, a); }

  static System cubic(double a, double d, double k);
  static System custom(Nonlinearity nl, double a, double d, double k);

  // Throws std::domain_error unless a in (0,1), d >= 0, k > 0.
  void validate() const;
};

// Exact model symmetry: (a,d,k) -> (1-a, dk, 1/k) with
// g~(v; a~) = -g(1-v; a), negating every wave speed. The cubic family is
// closed under this transform, so a cubic system stays cubic; custom
// systems get wrapped evaluators. Applying reflect twice returns the
// original parameters.
System reflect(const System& s);

struct HypothesisCheck {
  bool pass = true;
  // First violating sample, when pass is false.
  double v = 0.0;
  double a = 0.0;
  std::string note;
};

struct HypothesisReport {
  HypothesisCheck hg;   // zeros at 0,a,1; sign pattern; slope signs
  HypothesisCheck hg1;  // da g < 0 on (0,1)^2; g(.;0) >= 0 >= g(.;1)
  HypothesisCheck hg2;  // convex-concave switch, checked at a in {0,1}
  bool all_pass() const { return hg.pass && hg1.pass && hg2.pass; }
};

// Grid-based certificate (not a proof) that the family satisfies the
// bistability hypotheses. grid_resolution >= 100 points per axis.
HypothesisReport check_hypotheses(const Nonlinearity& nl,
                                  int grid_resolution = 512);

// Named built-ins reachable from the CLI; returns nullopt for unknown names.
std::optional<Nonlinearity> nonlinearity_registry(const std::string& name);

}  // namespace treewave
