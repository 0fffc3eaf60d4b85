#pragma once

#include <functional>

namespace covertime {

struct MinimizeResult {
  double argmin = 0;
  double value = 0;
  int evaluations = 0;
};

/// Minimise f over [r_lo, r_hi]. A 32-point log-spaced scan brackets the
/// minimum, then golden-section search in log r refines it to relative
/// tolerance `tol`. Throws NumericRefusal when the scan sees several local
/// minima or the minimum sits on the edge of the range (no bracket).
MinimizeResult grid_minimize_mct(const std::function<double(double)>& f, double r_lo,
                                 double r_hi, double tol = 1e-8);

}  // namespace covertime
