#include "covertime/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "covertime/error.hpp"

namespace covertime {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << value;
    throw ValidationError(os.str());
  }
}

// log(sinh x), x > 0
double log_sinh(double x) {
  if (x < 0.5) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - kLn2;
}

// log(cosh x), x >= 0
double log_cosh(double x) { return x + std::log1p(std::exp(-2.0 * x)) - kLn2; }

// log(e^x - 1), x > 0
double log_expm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

// log(1 + e^x)
double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// log(e^x + e^y)
double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == -std::numeric_limits<double>::infinity()) return x;
  return x + std::log1p(std::exp(y - x));
}

double log_add(double x, double y, double z) { return log_add(log_add(x, y), z); }

void validate_bm(double a, double b, double diffusivity, double rate) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(diffusivity, "diffusivity D");
  require_positive(rate, "resetting rate r");
}

void validate_rtp(double a, double speed, double switch_rate, double rate) {
  require_positive(a, "a");
  require_positive(speed, "speed v");
  require_positive(switch_rate, "switch rate gamma");
  require_positive(rate, "resetting rate r");
}

// -- Brownian pieces (all logs) ----------------------------------------------

// Interval exit; sinh(A + B) - sinh A - sinh B rewritten as
// sinh A (cosh B - 1) + sinh B (cosh A - 1) so that small alpha does not cancel.
double log_bm_interval_exit(double a, double b, double alpha, double log_r) {
  const double x = a * alpha;
  const double y = b * alpha;
  const double num = log_add(log_sinh(x) + kLn2 + 2.0 * log_sinh(0.5 * y),
                             log_sinh(y) + kLn2 + 2.0 * log_sinh(0.5 * x));
  return num - log_add(log_sinh(x), log_sinh(y)) - log_r;
}

double log_bm_xi_a(double a, double b, double alpha) {
  return log_sinh(b * alpha) - log_add(log_sinh(a * alpha), log_sinh(b * alpha));
}

double log_bm_halfline(double x0, double xr, double alpha, double log_r) {
  return std::log(-std::expm1(-alpha * x0)) + alpha * xr - log_r;
}

// Reflecting wall at `near`, start there, reset to 0, target at distance
// `far` on the other side: (cosh((a + b) alpha) - 1) / (r cosh(near alpha)).
double log_bm_constrained_leg(double near, double far, double alpha, double log_r) {
  return kLn2 + 2.0 * log_sinh(0.5 * (near + far) * alpha) - log_cosh(near * alpha) - log_r;
}

// -- RTP pieces ---------------------------------------------------------------

struct RtpScalars {
  double c_r;
  double y;    // a c_r
  double rho;  // sqrt(r / (r + 2 gamma))
  double log_r;
  double log_vc;  // log(v c_r)
};

RtpScalars rtp_scalars(double a, double speed, double switch_rate, double rate) {
  RtpScalars s{};
  const double vc = std::sqrt(rate * (rate + 2.0 * switch_rate));
  s.c_r = vc / speed;
  s.y = a * s.c_r;
  s.rho = std::sqrt(rate / (rate + 2.0 * switch_rate));
  s.log_r = std::log(rate);
  s.log_vc = std::log(vc);
  return s;
}

double log_rtp_interval_exit(const RtpScalars& s) {
  return log_add(kLn2 + 2.0 * log_sinh(0.5 * s.y), std::log(s.rho) + log_sinh(s.y)) - s.log_r;
}

// (1 / r) ((1 + rho) e^y - 1)
double log_rtp_halfline(const RtpScalars& s) {
  return log_add(std::log(s.rho) + s.y, log_expm1(s.y)) - s.log_r;
}

// (1 / r) ((1 + rho) e^y - (1 - rho) e^-y) = (2 / r) (sinh y + rho cosh y)
double log_rtp_escape(const RtpScalars& s) {
  return kLn2 + log_add(log_sinh(s.y), std::log(s.rho) + log_cosh(s.y)) - s.log_r;
}

// 2 (v c sinh y + r cosh y) tanh y / (r v c)
double log_rtp_constrained_leg(const RtpScalars& s) {
  const double ls = log_sinh(s.y);
  const double lc = log_cosh(s.y);
  return kLn2 + log_add(s.log_vc + ls, s.log_r + lc) + ls - lc - s.log_r - s.log_vc;
}

}  // namespace

// ---------------------------------------------------------------------------

double BmComponents::halfline_exit_mean(double x0, double xr) const {
  if (!(x0 >= 0.0) || !(xr > 0.0))
    throw ValidationError("half-line exit: need x0 >= 0 and xr > 0");
  if (x0 == 0.0) return 0.0;
  return std::exp(log_bm_halfline(x0, xr, alpha, std::log(rate)));
}

BmComponents bm_components(double a, double b, double diffusivity, double rate) {
  validate_bm(a, b, diffusivity, rate);
  BmComponents c;
  c.a = a;
  c.b = b;
  c.diffusivity = diffusivity;
  c.rate = rate;
  c.alpha = std::sqrt(rate / diffusivity);
  const double log_r = std::log(rate);
  c.interval_exit_mean = std::exp(log_bm_interval_exit(a, b, c.alpha, log_r));
  c.xi_a = std::exp(log_bm_xi_a(a, b, c.alpha));
  c.xi_b = std::exp(log_bm_xi_a(b, a, c.alpha));
  c.constrained_leg_a = std::exp(log_bm_constrained_leg(b, a, c.alpha, log_r));
  c.constrained_leg_b = std::exp(log_bm_constrained_leg(a, b, c.alpha, log_r));
  return c;
}

double log_bm_mct_unconstrained(double a, double b, double diffusivity, double rate) {
  validate_bm(a, b, diffusivity, rate);
  const double alpha = std::sqrt(rate / diffusivity);
  const double x = a * alpha;
  const double y = b * alpha;
  const double top = 2.0 * std::max(x, y);
  // numerator e^{x+y} + e^{2x} + e^{2y} - e^x - e^y - 1
  double log_num;
  if (top < 600.0) {
    log_num = std::log(std::expm1(x + y) + std::expm1(2.0 * x) + std::expm1(2.0 * y) -
                       std::expm1(x) - std::expm1(y));
  } else {
    const double inner = std::exp(x + y - top) + std::exp(2.0 * x - top) +
                         std::exp(2.0 * y - top) - std::exp(x - top) - std::exp(y - top) -
                         std::exp(-top);
    log_num = top + std::log(inner);
  }
  return log_num - std::log(rate) - log_add(x, y);
}

double log_bm_mct_unconstrained_composed(double a, double b, double diffusivity, double rate) {
  validate_bm(a, b, diffusivity, rate);
  const double alpha = std::sqrt(rate / diffusivity);
  const double log_r = std::log(rate);
  return log_add(log_bm_interval_exit(a, b, alpha, log_r),
                 log_bm_xi_a(a, b, alpha) + log_bm_halfline(a + b, b, alpha, log_r),
                 log_bm_xi_a(b, a, alpha) + log_bm_halfline(a + b, a, alpha, log_r));
}

double log_bm_mct_constrained(double a, double b, double diffusivity, double rate) {
  validate_bm(a, b, diffusivity, rate);
  const double alpha = std::sqrt(rate / diffusivity);
  const double log_r = std::log(rate);
  const double x = a * alpha;
  const double y = b * alpha;
  // (xi_a / r) (e^{x+y} - 1)^2 / (e^y (e^{2x} + 1)) and the mirror term.
  const double log_sq = 2.0 * log_expm1(x + y);
  const double term_a = log_bm_xi_a(a, b, alpha) + log_sq - y - log1p_exp(2.0 * x) - log_r;
  const double term_b = log_bm_xi_a(b, a, alpha) + log_sq - x - log1p_exp(2.0 * y) - log_r;
  return log_add(log_bm_interval_exit(a, b, alpha, log_r), term_a, term_b);
}

double log_bm_mct_constrained_composed(double a, double b, double diffusivity, double rate) {
  validate_bm(a, b, diffusivity, rate);
  const double alpha = std::sqrt(rate / diffusivity);
  const double log_r = std::log(rate);
  return log_add(log_bm_interval_exit(a, b, alpha, log_r),
                 log_bm_xi_a(a, b, alpha) + log_bm_constrained_leg(a, b, alpha, log_r),
                 log_bm_xi_a(b, a, alpha) + log_bm_constrained_leg(b, a, alpha, log_r));
}

double bm_mct_unconstrained(double a, double b, double diffusivity, double rate) {
  return std::exp(log_bm_mct_unconstrained(a, b, diffusivity, rate));
}

double bm_mct_constrained(double a, double b, double diffusivity, double rate) {
  return std::exp(log_bm_mct_constrained(a, b, diffusivity, rate));
}

// ---------------------------------------------------------------------------

RtpComponents rtp_components(double a, double speed, double switch_rate, double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  // v c_r = sqrt(r (r + 2 gamma)) < r + 2 gamma, so the pole of the
  // half-line formula is never reached.
  if (!(s.c_r * speed < rate + 2.0 * switch_rate))
    throw NumericRefusal("RTP half-line formula evaluated at its pole");
  RtpComponents c;
  c.a = a;
  c.speed = speed;
  c.switch_rate = switch_rate;
  c.rate = rate;
  c.c_r = s.c_r;
  c.interval_exit_mean = std::exp(log_rtp_interval_exit(s));
  c.halfline_exit_mean = std::exp(log_rtp_halfline(s));
  c.escape_leg = std::exp(log_rtp_escape(s));
  c.constrained_leg = std::exp(log_rtp_constrained_leg(s));
  return c;
}

double log_rtp_mct_unconstrained(double a, double speed, double switch_rate, double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  // (1 / r)(cosh y + rho sinh y + K e^y - 2), K = 2 gamma / (r + 2 gamma - v c_r).
  // The denominator is rationalised: r + 2 gamma - sqrt(r (r + 2 gamma))
  //   = sqrt(r + 2 gamma) 2 gamma / (sqrt(r + 2 gamma) + sqrt(r)).
  const double root_sum = std::sqrt(rate + 2.0 * switch_rate);
  const double denominator = root_sum * 2.0 * switch_rate / (root_sum + std::sqrt(rate));
  const double K = 2.0 * switch_rate / denominator;
  const double sum = log_add(log_add(kLn2 + 2.0 * log_sinh(0.5 * s.y),  // cosh y - 1
                                     std::log(s.rho) + log_sinh(s.y)),
                             std::log(K) + log_expm1(s.y),  // K (e^y - 1)
                             std::log(K - 1.0));
  return sum - s.log_r;
}

double log_rtp_mct_unconstrained_composed(double a, double speed, double switch_rate,
                                          double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  return log_add(log_rtp_interval_exit(s), log_rtp_halfline(s));
}

double log_rtp_mct_unconstrained_exact(double a, double speed, double switch_rate,
                                       double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  // (1 + 2 rho)(cosh y - 1) + 2 rho + (2 + rho) sinh y
  const double sum = log_add(std::log1p(2.0 * s.rho) + kLn2 + 2.0 * log_sinh(0.5 * s.y),
                             std::log(2.0 * s.rho), std::log(2.0 + s.rho) + log_sinh(s.y));
  return sum - s.log_r;
}

double log_rtp_mct_unconstrained_exact_composed(double a, double speed, double switch_rate,
                                                double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  return log_add(log_rtp_interval_exit(s), log_rtp_escape(s));
}

double log_rtp_mct_constrained(double a, double speed, double switch_rate, double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  // (v c cosh y + sinh y (2 v c tanh y + 3 r) - v c) / (r v c)
  const double vc = std::exp(s.log_vc);
  const double tanh_y = std::exp(log_sinh(s.y) - log_cosh(s.y));
  const double num = log_add(s.log_vc + kLn2 + 2.0 * log_sinh(0.5 * s.y),
                             log_sinh(s.y) + std::log(2.0 * vc * tanh_y + 3.0 * rate));
  return num - s.log_r - s.log_vc;
}

double log_rtp_mct_constrained_composed(double a, double speed, double switch_rate,
                                        double rate) {
  validate_rtp(a, speed, switch_rate, rate);
  const RtpScalars s = rtp_scalars(a, speed, switch_rate, rate);
  return log_add(log_rtp_interval_exit(s), log_rtp_constrained_leg(s));
}

double rtp_mct_unconstrained(double a, double speed, double switch_rate, double rate) {
  return std::exp(log_rtp_mct_unconstrained(a, speed, switch_rate, rate));
}

double rtp_mct_unconstrained_exact(double a, double speed, double switch_rate, double rate) {
  return std::exp(log_rtp_mct_unconstrained_exact(a, speed, switch_rate, rate));
}

double rtp_mct_constrained(double a, double speed, double switch_rate, double rate) {
  return std::exp(log_rtp_mct_constrained(a, speed, switch_rate, rate));
}

// ---------------------------------------------------------------------------

double log_mean_cover_time(const BrownianSpec& searcher, const IntervalTarget& target,
                           const ResetClock& clock) {
  searcher.validate();
  target.validate();
  if (!clock.is_exponential())
    throw ValidationError("closed-form mean cover times need an exponential resetting clock");
  const double a = target.effective_a();
  const double b = target.effective_b();
  return target.constrained
             ? log_bm_mct_constrained(a, b, searcher.diffusivity, clock.rate())
             : log_bm_mct_unconstrained(a, b, searcher.diffusivity, clock.rate());
}

double log_mean_cover_time(const RtpSpec& searcher, const IntervalTarget& target,
                           const ResetClock& clock, RtpFormula formula) {
  searcher.validate();
  target.validate();
  if (!clock.is_exponential())
    throw ValidationError("closed-form mean cover times need an exponential resetting clock");
  if (target.a != target.b)
    throw ValidationError("RTP closed forms need a symmetric interval (a == b)");
  if (searcher.initial_velocity != InitialVelocity::SymmetricRandom)
    throw ValidationError("RTP closed forms assume a uniformly random velocity after resets");
  const double a = target.effective_a();
  const double v = searcher.speed;
  const double g = searcher.switch_rate;
  const double r = clock.rate();
  if (target.constrained) return log_rtp_mct_constrained(a, v, g, r);
  return formula == RtpFormula::Published ? log_rtp_mct_unconstrained(a, v, g, r)
                                          : log_rtp_mct_unconstrained_exact(a, v, g, r);
}

// ---------------------------------------------------------------------------

AsymptoticSetting AsymptoticSetting::bm1d(double a, double b, double diffusivity) {
  AsymptoticSetting s;
  s.kind = a == b ? SettingKind::Bm1dSymmetric : SettingKind::Bm1dAsymmetric;
  s.a = a;
  s.b = b;
  s.diffusivity = diffusivity;
  s.validate();
  return s;
}

AsymptoticSetting AsymptoticSetting::rtp1d(double a, double speed, double switch_rate) {
  AsymptoticSetting s;
  s.kind = SettingKind::Rtp1dSymmetric;
  s.a = a;
  s.b = a;
  s.speed = speed;
  s.switch_rate = switch_rate;
  s.validate();
  return s;
}

AsymptoticSetting AsymptoticSetting::ball(double a, double R, double diffusivity, int dimension) {
  AsymptoticSetting s;
  s.kind = SettingKind::BallRd;
  s.a = a;
  s.R = R;
  s.diffusivity = diffusivity;
  s.dimension = dimension;
  s.validate();
  return s;
}

AsymptoticSetting AsymptoticSetting::torus(double ell, double R, double diffusivity,
                                           int dimension) {
  AsymptoticSetting s;
  s.kind = SettingKind::TorusRd;
  s.ell = ell;
  s.R = R;
  s.diffusivity = diffusivity;
  s.dimension = dimension;
  s.validate();
  return s;
}

AsymptoticSetting AsymptoticSetting::subdiffusion(double L, double diffusivity, double alpha) {
  AsymptoticSetting s;
  s.kind = SettingKind::Subdiffusion;
  s.L = L;
  s.diffusivity = diffusivity;
  s.subdiffusion_alpha = alpha;
  s.validate();
  return s;
}

void AsymptoticSetting::validate() const {
  switch (kind) {
    case SettingKind::Bm1dAsymmetric:
    case SettingKind::Bm1dSymmetric:
      require_positive(a, "a");
      require_positive(b, "b");
      require_positive(diffusivity, "diffusivity D");
      if ((kind == SettingKind::Bm1dSymmetric) != (a == b))
        throw ValidationError("1D Brownian setting: symmetric kind requires a == b");
      break;
    case SettingKind::Rtp1dSymmetric:
      require_positive(a, "a");
      require_positive(speed, "speed v");
      require_positive(switch_rate, "switch rate gamma");
      break;
    case SettingKind::BallRd:
    case SettingKind::TorusRd:
      require_positive(diffusivity, "diffusivity D");
      if (dimension < 1) throw ValidationError("dimension must be >= 1");
      if (!(R >= 0.0)) throw ValidationError("detection radius must be non-negative");
      if (!(far_distance() > 0.0))
        throw ValidationError("far target lies inside the initial detection ball (L <= 0)");
      break;
    case SettingKind::Subdiffusion:
      require_positive(L, "distance L");
      require_positive(diffusivity, "diffusivity D");
      if (!(subdiffusion_alpha > 0.0 && subdiffusion_alpha < 1.0))
        throw ValidationError("subdiffusion exponent alpha must lie in (0, 1)");
      break;
  }
}

double AsymptoticSetting::far_distance() const {
  switch (kind) {
    case SettingKind::Bm1dAsymmetric:
    case SettingKind::Bm1dSymmetric:
      return std::max(a, b);
    case SettingKind::Rtp1dSymmetric:
      return a;
    case SettingKind::BallRd:
      return a - R;
    case SettingKind::TorusRd:
      return ell - 2.0 * R;
    case SettingKind::Subdiffusion:
      return L;
  }
  return 0.0;
}

FarPoints AsymptoticSetting::far_points() const {
  switch (kind) {
    case SettingKind::Bm1dSymmetric:
    case SettingKind::Rtp1dSymmetric:
      return FarPoints::TwoSymmetric;
    default:
      return FarPoints::One;
  }
}

SubdiffusionExponent subdiffusion_exponent(double L, double diffusivity, double alpha) {
  require_positive(L, "distance L");
  require_positive(diffusivity, "diffusivity D");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("subdiffusion exponent alpha must lie in (0, 1)");
  SubdiffusionExponent e;
  e.beta = alpha / (2.0 - alpha);
  // The short-time constant is taken on L^2 / 4D (positive), so that ln p < 0.
  e.C = (2.0 - alpha) * std::pow(alpha, e.beta) *
        std::pow(L * L / (4.0 * diffusivity), e.beta / alpha);
  e.gamma = (e.beta + 1.0) / std::pow(e.beta, e.beta / (e.beta + 1.0)) *
            std::pow(e.C, 1.0 / (e.beta + 1.0));
  return e;
}

double log_success_prob_asymptotic(const AsymptoticSetting& setting, double rate) {
  setting.validate();
  require_positive(rate, "resetting rate r");
  const double L = setting.far_distance();
  switch (setting.kind) {
    case SettingKind::Bm1dAsymmetric:
    case SettingKind::Bm1dSymmetric:
      return -L * std::sqrt(rate / setting.diffusivity);
    case SettingKind::Rtp1dSymmetric:
      return -setting.a * (setting.switch_rate + rate) / setting.speed - kLn2;
    case SettingKind::BallRd:
    case SettingKind::TorusRd:
      return -std::sqrt(L * L * rate / (4.0 * setting.diffusivity));
    case SettingKind::Subdiffusion: {
      const auto e = subdiffusion_exponent(L, setting.diffusivity, setting.subdiffusion_alpha);
      return -e.gamma * std::pow(rate, e.beta / (e.beta + 1.0));
    }
  }
  return 0.0;
}

double log_mct_frequent_reset_approx(int m, double rate, double log_p, double prefactor) {
  if (m < 1) throw ValidationError("moment order must be >= 1");
  require_positive(rate, "resetting rate r");
  require_positive(prefactor, "prefactor");
  return std::log(prefactor) + std::lgamma(m + 1.0) - m * (std::log(rate) + log_p);
}

double mct_frequent_reset_approx(int m, double rate, double log_p, double prefactor) {
  return std::exp(log_mct_frequent_reset_approx(m, rate, log_p, prefactor));
}

double far_points_prefactor(FarPoints far, int m) {
  if (m < 1) throw ValidationError("moment order must be >= 1");
  return far == FarPoints::One ? 1.0 : 2.0 - std::ldexp(1.0, -m);
}

double optimal_rate_estimate(const AsymptoticSetting& setting) {
  setting.validate();
  const double L = setting.far_distance();
  switch (setting.kind) {
    case SettingKind::Bm1dAsymmetric:
    case SettingKind::Bm1dSymmetric:
      return 4.0 * setting.diffusivity / (L * L);
    case SettingKind::Rtp1dSymmetric:
      return setting.speed / setting.a;
    case SettingKind::BallRd:
    case SettingKind::TorusRd:
      return 16.0 * setting.diffusivity / (L * L);
    case SettingKind::Subdiffusion: {
      const auto e = subdiffusion_exponent(L, setting.diffusivity, setting.subdiffusion_alpha);
      return std::pow((e.beta + 1.0) / (e.gamma * e.beta), (e.beta + 1.0) / e.beta);
    }
  }
  throw ValidationError("no optimal-rate formula for this setting");
}

}  // namespace covertime
