#include "covertime/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "covertime/error.hpp"

namespace covertime {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

MomentEstimate accumulate_estimate(std::span<const double> samples, int order,
                                   std::uint64_t seed, bool with_error) {
  if (samples.empty()) throw ValidationError("accumulate_estimate: no samples");
  if (order < 1) throw ValidationError("accumulate_estimate: order must be >= 1");
  if (with_error && samples.size() < 2)
    throw ValidationError("accumulate_estimate: standard error needs at least 2 samples");

  const auto n = static_cast<double>(samples.size());
  auto power = [order](double x) { return order == 1 ? x : std::pow(x, order); };

  CompensatedSum sum;
  for (double x : samples) sum.add(power(x));
  const double mean = sum.value() / n;

  MomentEstimate est;
  est.order = order;
  est.mean = mean;
  est.n_samples = samples.size();
  est.seed = seed;
  if (with_error) {
    CompensatedSum sq;
    for (double x : samples) {
      const double d = power(x) - mean;
      sq.add(d * d);
    }
    est.std_error = std::sqrt(sq.value() / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

double ks_distance_unit_exponential(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("ks distance: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i] > 0.0 ? -std::expm1(-samples[i]) : 0.0;
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - cdf,
                             cdf - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace covertime
