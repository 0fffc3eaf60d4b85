#include "covertime/reset_clock.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "covertime/error.hpp"

namespace covertime {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << value;
    throw ValidationError(os.str());
  }
}

}  // namespace

ResetClock ResetClock::exponential(double rate) {
  require_positive(rate, "resetting rate");
  return ResetClock(ClockFamily::Exponential, rate, 1.0);
}

ResetClock ResetClock::deterministic(double rate) {
  require_positive(rate, "resetting rate");
  return ResetClock(ClockFamily::Deterministic, rate, 0.0);
}

ResetClock ResetClock::gamma_unit_mean(double shape, double rate) {
  require_positive(rate, "resetting rate");
  require_positive(shape, "gamma shape");
  return ResetClock(ClockFamily::GammaUnitMean, rate, shape);
}

double ResetClock::sample(RandomStream& rng) const {
  switch (family_) {
    case ClockFamily::Deterministic:
      return 1.0 / rate_;
    case ClockFamily::Exponential:
      return -std::log(uniform_open_closed(rng)) / rate_;
    case ClockFamily::GammaUnitMean: {
      std::gamma_distribution<double> y(shape_, 1.0 / shape_);
      double draw = 0.0;
      while (!(draw > 0.0)) draw = y(rng);
      return draw / rate_;
    }
  }
  return 1.0 / rate_;
}

std::string ResetClock::describe() const {
  std::ostringstream os;
  switch (family_) {
    case ClockFamily::Exponential:
      os << "exponential(rate=" << rate_ << ")";
      break;
    case ClockFamily::Deterministic:
      os << "deterministic(rate=" << rate_ << ")";
      break;
    case ClockFamily::GammaUnitMean:
      os << "gamma(shape=" << shape_ << ", rate=" << rate_ << ")";
      break;
  }
  return os.str();
}

RandomStream make_stream(std::uint64_t seed, std::uint64_t index) {
  auto splitmix = [](std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t state = seed;
  const std::uint64_t s0 = splitmix(state);
  state ^= index * 0xd1b54a32d192ed03ULL;
  const std::uint64_t s1 = splitmix(state);
  const std::uint64_t s2 = splitmix(state);
  std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                    static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32),
                    static_cast<std::uint32_t>(s2), static_cast<std::uint32_t>(s2 >> 32)};
  return RandomStream(seq);
}

}  // namespace covertime
