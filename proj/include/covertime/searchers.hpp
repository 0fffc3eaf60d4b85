#pragma once

namespace covertime {

/// 1D Brownian searcher started at, and reset to, the origin.
struct BrownianSpec {
  double diffusivity = 1.0;  // D

  void validate() const;
};

enum class InitialVelocity { Plus, Minus, SymmetricRandom };

/// 1D run-and-tumble particle started at, and reset to, the origin.
/// The velocity sign is drawn according to `initial_velocity` at t = 0 and
/// after every reset.
struct RtpSpec {
  double speed = 1.0;        // v
  double switch_rate = 1.0;  // gamma
  InitialVelocity initial_velocity = InitialVelocity::SymmetricRandom;

  void validate() const;
};

/// Target interval [-a, b]. With `constrained` the searcher is confined by
/// reflecting walls at -a and b. A detection radius R > 0 shrinks the
/// interval the point particle must cover to [R - a, b - R].
struct IntervalTarget {
  double a = 1.0;
  double b = 1.0;
  bool constrained = false;
  double detection_radius = 0.0;

  void validate() const;
  /// Half-widths of the point-particle interval, (a - R, b - R).
  double effective_a() const { return a - detection_radius; }
  double effective_b() const { return b - detection_radius; }
};

}  // namespace covertime
