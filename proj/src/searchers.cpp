#include "covertime/searchers.hpp"

#include <algorithm>
#include <cmath>
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

void BrownianSpec::validate() const { require_positive(diffusivity, "diffusivity D"); }

void RtpSpec::validate() const {
  require_positive(speed, "speed v");
  require_positive(switch_rate, "switch rate gamma");
}

void IntervalTarget::validate() const {
  require_positive(a, "interval half-width a");
  require_positive(b, "interval half-width b");
  if (!(detection_radius >= 0.0) || !std::isfinite(detection_radius))
    throw ValidationError("detection radius must be non-negative");
  if (detection_radius > 0.0 && !(detection_radius < std::min(a, b)))
    throw ValidationError("detection radius must be smaller than min(a, b)");
}

}  // namespace covertime
