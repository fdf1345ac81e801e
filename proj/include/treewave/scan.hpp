#pragma once
#include <functional>

namespace treewave {

struct MaxResult {
  double x = 0.0;
  double value = 0.0;
  // True when the maximiser is strictly inside [lo,hi]; boundary maxima are
  // reported with interior = false so callers can decide whether that still
  // counts (several thresholds are defined as interior maxima only).
  bool interior = false;
};

// Maximum of f over [lo, hi]: coarse grid (n_grid points) followed by
// golden-section refinement around the best sample down to bracket width
// refine_width. f is assumed continuous; for the piecewise-smooth ratios in
// this library 1024 samples resolve every lobe that matters at desk scale.
MaxResult max_scan(const std::function<double(double)>& f, double lo,
                   double hi, int n_grid = 1024, double refine_width = 1e-10);

// Root of f in [lo, hi] with f(lo), f(hi) of opposite sign (throws
// std::invalid_argument otherwise). Plain bisection down to width xtol.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol = 1e-13);

}  // namespace treewave
