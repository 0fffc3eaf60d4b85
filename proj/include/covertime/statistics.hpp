#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace covertime {

/// Monte Carlo estimate of E[X^order].
struct MomentEstimate {
  int order = 1;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Sample mean of x^order and its standard error (sample sd / sqrt(n)).
/// Throws ValidationError on empty input, order < 1, or n < 2 when
/// with_error is set.
MomentEstimate accumulate_estimate(std::span<const double> samples, int order,
                                   std::uint64_t seed, bool with_error = true);

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// the unit-rate exponential distribution.
double ks_distance_unit_exponential(std::vector<double> samples);

}  // namespace covertime
