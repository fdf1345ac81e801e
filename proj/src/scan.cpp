#include "treewave/scan.hpp"

#include <cmath>
#include <stdexcept>

namespace treewave {

MaxResult max_scan(const std::function<double(double)>& f, double lo,
                   double hi, int n_grid, double refine_width) {
  if (!(hi > lo)) {
    MaxResult r;
    r.x = lo;
    r.value = f(lo);
    return r;
  }
  if (n_grid < 3) n_grid = 3;

  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i < n_grid; ++i) {
    double x = lo + (hi - lo) * i / (n_grid - 1);
    double v = f(x);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }

  double h = (hi - lo) / (n_grid - 1);
  double a = std::max(lo, lo + (best - 1) * h);
  double b = std::min(hi, lo + (best + 1) * h);

  // Golden-section on [a,b]; the bracket contains the best grid sample, so a
  // unimodal-near-the-peak f ends up resolved to refine_width.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > refine_width) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }

  MaxResult r;
  r.x = 0.5 * (a + b);
  r.value = f(r.x);
  if (best_val > r.value) {
    // Refinement can only lose against the grid when f is jagged near the
    // peak; keep whichever sample actually won.
    r.x = lo + best * h;
    r.value = best_val;
  }
  double span = hi - lo;
  r.interior = (r.x - lo > 1e-9 * span) && (hi - r.x > 1e-9 * span);
  return r;
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: no sign change on interval");
  while (hi - lo > xtol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // hit floating point resolution
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace treewave
