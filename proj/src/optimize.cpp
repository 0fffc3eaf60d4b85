#include "covertime/optimize.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "covertime/error.hpp"

namespace covertime {

namespace {
constexpr int kScanPoints = 32;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
}  // namespace

MinimizeResult grid_minimize_mct(const std::function<double(double)>& f, double r_lo,
                                 double r_hi, double tol) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || !std::isfinite(r_hi))
    throw ValidationError("grid_minimize_mct: need 0 < r_lo < r_hi");
  if (!(tol > 0.0)) throw ValidationError("grid_minimize_mct: tolerance must be positive");

  MinimizeResult out;
  auto eval = [&](double log_r) {
    ++out.evaluations;
    const double v = f(std::exp(log_r));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "objective is not finite at r = " << std::exp(log_r);
      throw NumericRefusal(os.str());
    }
    return v;
  };

  const double lo = std::log(r_lo);
  const double hi = std::log(r_hi);
  std::array<double, kScanPoints> x{}, y{};
  for (int i = 0; i < kScanPoints; ++i) {
    x[i] = lo + (hi - lo) * i / (kScanPoints - 1);
    y[i] = eval(x[i]);
  }

  int best = 0;
  int n_minima = 0;
  for (int i = 0; i < kScanPoints; ++i) {
    if (y[i] < y[best]) best = i;
    const bool left = i == 0 || y[i] < y[i - 1];
    const bool right = i == kScanPoints - 1 || y[i] < y[i + 1];
    if (left && right) ++n_minima;
  }
  if (best == 0 || best == kScanPoints - 1) {
    std::ostringstream os;
    os << "minimum lies on the edge of [" << r_lo << ", " << r_hi << "]; no bracket";
    throw NumericRefusal(os.str());
  }
  if (n_minima > 1) throw NumericRefusal("objective is not unimodal on the scan grid");

  // golden section on [x[best-1], x[best+1]]
  double a = x[best - 1], b = x[best + 1];
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c), fd = eval(d);
  const double log_tol = std::log1p(tol);
  while (b - a > log_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  const double xm = 0.5 * (a + b);
  out.argmin = std::exp(xm);
  out.value = eval(xm);
  return out;
}

}  // namespace covertime
