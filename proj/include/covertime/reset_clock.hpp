#pragma once

#include <string>

#include "covertime/rng.hpp"

namespace covertime {

enum class ClockFamily { Exponential, Deterministic, GammaUnitMean };

/// Law of the time between resets, sigma = Y / rate, where Y > 0 has unit
/// mean: Exp(1), the constant 1, or Gamma(shape, 1/shape).
class ResetClock {
 public:
  static ResetClock exponential(double rate);
  static ResetClock deterministic(double rate);
  static ResetClock gamma_unit_mean(double shape, double rate);

  ClockFamily family() const { return family_; }
  double rate() const { return rate_; }
  /// Gamma shape; 1 for the exponential family, 0 for deterministic.
  double shape() const { return shape_; }
  bool is_exponential() const { return family_ == ClockFamily::Exponential; }

  /// One strictly positive draw of sigma.
  double sample(RandomStream& rng) const;

  std::string describe() const;

 private:
  ResetClock(ClockFamily family, double rate, double shape)
      : family_(family), rate_(rate), shape_(shape) {}

  ClockFamily family_;
  double rate_;
  double shape_;
};

inline double sample_reset_time(const ResetClock& clock, RandomStream& rng) {
  return clock.sample(rng);
}

}  // namespace covertime
