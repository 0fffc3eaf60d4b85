#pragma once

#include "covertime/reset_clock.hpp"
#include "covertime/searchers.hpp"

// Mean cover times of an interval by 1D searchers under exponential
// resetting to the origin, plus frequent-resetting asymptotics.
//
// Every closed form has a log-space evaluator (log_*) that stays finite for
// resetting rates where the mean itself overflows a double; the plain
// functions return exp() of it. The *_composed variants rebuild the same
// quantity from the strong-Markov decomposition (interval exit + second leg)
// and serve as an independent route for cross-checks.

namespace covertime {

// ---------------------------------------------------------------------------
// Brownian searcher, interval [-a, b], diffusivity D, resetting rate r.

struct BmComponents {
  double a = 0, b = 0, diffusivity = 0, rate = 0;
  double alpha = 0;               // sqrt(r / D)
  double interval_exit_mean = 0;  // exit from (-a, b)
  double xi_a = 0;                // P(-a is reached before b)
  double xi_b = 0;                // P(b is reached before -a)
  /// Reflecting wall at b, start at b: mean time to reach -a.
  double constrained_leg_a = 0;
  /// Reflecting wall at -a, start at -a: mean time to reach b.
  double constrained_leg_b = 0;

  /// Mean exit time of the half line (0, inf) from x0 > 0 with resetting
  /// to xr > 0.
  double halfline_exit_mean(double x0, double xr) const;
};

BmComponents bm_components(double a, double b, double diffusivity, double rate);

double log_bm_mct_unconstrained(double a, double b, double diffusivity, double rate);
double log_bm_mct_unconstrained_composed(double a, double b, double diffusivity, double rate);
double log_bm_mct_constrained(double a, double b, double diffusivity, double rate);
double log_bm_mct_constrained_composed(double a, double b, double diffusivity, double rate);

double bm_mct_unconstrained(double a, double b, double diffusivity, double rate);
double bm_mct_constrained(double a, double b, double diffusivity, double rate);

// ---------------------------------------------------------------------------
// Run-and-tumble particle, symmetric interval [-a, a], speed v, switching
// rate gamma, velocity resampled uniformly at t = 0 and after every reset.

struct RtpComponents {
  double a = 0, speed = 0, switch_rate = 0, rate = 0;
  double c_r = 0;                 // sqrt(r (r + 2 gamma)) / v
  double interval_exit_mean = 0;  // exit from (-a, a)
  /// Mean time to reach -a when started at the reset point with a random
  /// velocity (distance a). This is the second leg of the published formula.
  double halfline_exit_mean = 0;
  /// Mean time to reach -a when started at +a moving away from it, which is
  /// the actual state after exiting through +a.
  double escape_leg = 0;
  /// Elastic wall at +a, start at +a: mean time to reach -a.
  double constrained_leg = 0;
};

RtpComponents rtp_components(double a, double speed, double switch_rate, double rate);

/// As published: interval exit plus the reset-point MFPT.
double log_rtp_mct_unconstrained(double a, double speed, double switch_rate, double rate);
double log_rtp_mct_unconstrained_composed(double a, double speed, double switch_rate,
                                          double rate);
/// Interval exit plus the escape leg, i.e. the true mean cover time:
/// ((1 + 2 rho) cosh y + (2 + rho) sinh y - 1) / r, y = a c_r,
/// rho = sqrt(r / (r + 2 gamma)).
double log_rtp_mct_unconstrained_exact(double a, double speed, double switch_rate, double rate);
double log_rtp_mct_unconstrained_exact_composed(double a, double speed, double switch_rate,
                                                double rate);
double log_rtp_mct_constrained(double a, double speed, double switch_rate, double rate);
double log_rtp_mct_constrained_composed(double a, double speed, double switch_rate, double rate);

double rtp_mct_unconstrained(double a, double speed, double switch_rate, double rate);
double rtp_mct_unconstrained_exact(double a, double speed, double switch_rate, double rate);
double rtp_mct_constrained(double a, double speed, double switch_rate, double rate);

// ---------------------------------------------------------------------------
// Entry points on domain types. The clock must be exponential; a detection
// radius R maps the problem onto the point-particle interval [R - a, b - R]
// (walls included, for constrained targets).

double log_mean_cover_time(const BrownianSpec& searcher, const IntervalTarget& target,
                           const ResetClock& clock);

enum class RtpFormula { Published, Exact };

double log_mean_cover_time(const RtpSpec& searcher, const IntervalTarget& target,
                           const ResetClock& clock, RtpFormula formula = RtpFormula::Published);

// ---------------------------------------------------------------------------
// Success probabilities and frequent-resetting approximations.

enum class SettingKind { Bm1dAsymmetric, Bm1dSymmetric, Rtp1dSymmetric, BallRd, TorusRd, Subdiffusion };

/// Number of farthest target points that control the r -> inf limit.
enum class FarPoints { One, TwoSymmetric };

struct AsymptoticSetting {
  SettingKind kind = SettingKind::Bm1dAsymmetric;
  double a = 0;    // interval half-width / ball radius
  double b = 0;    // right half-width (1D Brownian)
  double R = 0;    // detection radius
  double ell = 0;  // torus diameter
  double L = 0;    // distance to the far target (subdiffusion)
  int dimension = 1;
  double diffusivity = 0;  // D, or the parent diffusivity for subdiffusion
  double speed = 0;
  double switch_rate = 0;
  double subdiffusion_alpha = 0;

  static AsymptoticSetting bm1d(double a, double b, double diffusivity);
  static AsymptoticSetting rtp1d(double a, double speed, double switch_rate);
  static AsymptoticSetting ball(double a, double R, double diffusivity, int dimension);
  static AsymptoticSetting torus(double ell, double R, double diffusivity, int dimension);
  static AsymptoticSetting subdiffusion(double L, double diffusivity, double alpha);

  void validate() const;
  /// Shortest distance the searcher must travel to detect the far target.
  double far_distance() const;
  FarPoints far_points() const;
};

struct SubdiffusionExponent {
  double beta = 0;   // alpha / (2 - alpha)
  double C = 0;      // short-time constant
  double gamma = 0;  // ln p ~ -gamma r^(beta / (beta + 1))
};

SubdiffusionExponent subdiffusion_exponent(double L, double diffusivity, double alpha);

/// Leading-order ln p for the far target as r -> inf.
///  - 1D Brownian: exact, ln p = -L sqrt(r / D), L = max(a, b).
///  - 1D RTP: ln p = -a (gamma + r) / v - ln 2 (one endpoint).
///  - ball / torus: ln p ~ -sqrt(L^2 r / 4D), L = a - R or ell - 2R.
///  - subdiffusion: ln p ~ -gamma r^(beta / (beta + 1)).
double log_success_prob_asymptotic(const AsymptoticSetting& setting, double rate);

/// prefactor * m! / (r p)^m, evaluated in log space.
double mct_frequent_reset_approx(int m, double rate, double log_p, double prefactor);
double log_mct_frequent_reset_approx(int m, double rate, double log_p, double prefactor);

/// Inclusion-exclusion prefactor of the m-th moment: 1 for a single far
/// point, 2 - 2^-m for two symmetric far points (3/2 for the mean).
double far_points_prefactor(FarPoints far, int m);

/// Closed-form r_opt from 1 / r = -d/dr ln p(r).
double optimal_rate_estimate(const AsymptoticSetting& setting);

}  // namespace covertime
