#include <doctest.h>

#include <cmath>
#include <random>

#include "covertime/continuum.hpp"
#include "covertime/error.hpp"
#include "support/frozen_values.hpp"

using namespace covertime;

namespace {

bool close(double x, double y, double rel) { return std::abs(x - y) <= rel * std::abs(y); }

// relative agreement of two means given by their logs
bool close_log(double lx, double ly, double rel) { return std::abs(std::expm1(lx - ly)) <= rel; }

}  // namespace

TEST_CASE("Brownian closed forms against high-precision oracles") {
  CHECK(close(bm_components(1, 2, 1, 1).interval_exit_mean, oracle::bm_exit_a1_b2_r1, 1e-13));
  CHECK(close(bm_mct_unconstrained(1, 2, 1, 1), oracle::bm_unc_a1_b2_r1, 1e-13));
  CHECK(close(bm_mct_unconstrained(1, 2, 1, 5), oracle::bm_unc_a1_b2_r5, 1e-13));
  CHECK(close(bm_mct_unconstrained(1, 2, 1, 10), oracle::bm_unc_a1_b2_r10, 1e-13));
  CHECK(close(bm_mct_unconstrained(1, 1, 1, 2), oracle::bm_unc_a1_b1_r2, 1e-13));
  // constrained values: independent reflecting-wall ODE solve
  CHECK(close(bm_mct_constrained(1, 2, 1, 1), oracle::bm_con_ode_a1_b2_r1, 1e-13));
  CHECK(close(bm_mct_constrained(1, 2, 1, 5), oracle::bm_con_ode_a1_b2_r5, 1e-13));
  CHECK(close(bm_mct_constrained(1, 1, 1, 2), oracle::bm_con_a1_b1_r2, 1e-13));
}

TEST_CASE("run-and-tumble closed forms against oracles") {
  struct Case {
    double a, v, g, r, unc_pub, con, unc_ode, exit_ode;
  };
  const Case cases[] = {
      {1, 1, 1, 0.5, oracle::rtp_unc_published_a1p0_v1p0_g1p0_r0p5,
       oracle::rtp_con_ode_a1p0_v1p0_g1p0_r0p5, oracle::rtp_unc_ode_a1p0_v1p0_g1p0_r0p5,
       oracle::rtp_exit_ode_a1p0_v1p0_g1p0_r0p5},
      {1, 1, 1, 2, oracle::rtp_unc_published_a1p0_v1p0_g1p0_r2p0,
       oracle::rtp_con_ode_a1p0_v1p0_g1p0_r2p0, oracle::rtp_unc_ode_a1p0_v1p0_g1p0_r2p0,
       oracle::rtp_exit_ode_a1p0_v1p0_g1p0_r2p0},
      {2, 1, 0.5, 1, oracle::rtp_unc_published_a2p0_v1p0_g0p5_r1p0,
       oracle::rtp_con_ode_a2p0_v1p0_g0p5_r1p0, oracle::rtp_unc_ode_a2p0_v1p0_g0p5_r1p0,
       oracle::rtp_exit_ode_a2p0_v1p0_g0p5_r1p0},
  };
  for (const auto& c : cases) {
    CAPTURE(c.r);
    CHECK(close(rtp_components(c.a, c.v, c.g, c.r).interval_exit_mean, c.exit_ode, 1e-13));
    CHECK(close(rtp_mct_unconstrained(c.a, c.v, c.g, c.r), c.unc_pub, 1e-13));
    CHECK(close(rtp_mct_unconstrained_exact(c.a, c.v, c.g, c.r), c.unc_ode, 1e-13));
    CHECK(close(rtp_mct_constrained(c.a, c.v, c.g, c.r), c.con, 1e-13));
    // the published unconstrained form undershoots the true mean
    CHECK(rtp_mct_unconstrained(c.a, c.v, c.g, c.r) < c.unc_ode);
  }
}

TEST_CASE("closed forms equal their strong-Markov compositions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, u(rng) / 2), b = std::pow(10.0, u(rng) / 2);
    const double D = std::pow(10.0, u(rng) / 2), r = std::pow(10.0, u(rng));
    const double v = std::pow(10.0, u(rng) / 2), g = std::pow(10.0, u(rng) / 2);
    CHECK(close_log(log_bm_mct_unconstrained_composed(a, b, D, r),
                    log_bm_mct_unconstrained(a, b, D, r), 1e-12));
    CHECK(close_log(log_bm_mct_constrained_composed(a, b, D, r),
                    log_bm_mct_constrained(a, b, D, r), 1e-12));
    CHECK(close_log(log_rtp_mct_unconstrained_composed(a, v, g, r),
                    log_rtp_mct_unconstrained(a, v, g, r), 1e-12));
    CHECK(close_log(log_rtp_mct_unconstrained_exact_composed(a, v, g, r),
                    log_rtp_mct_unconstrained_exact(a, v, g, r), 1e-12));
    CHECK(close_log(log_rtp_mct_constrained_composed(a, v, g, r),
                    log_rtp_mct_constrained(a, v, g, r), 1e-12));
  }
}

TEST_CASE("log-space evaluation survives overflow") {
  const double r = 1e6;
  const double lu = log_bm_mct_unconstrained(1, 2, 1, r);
  const double lc = log_bm_mct_constrained(1, 2, 1, r);
  CHECK(std::isfinite(lu));
  CHECK(std::isfinite(lc));
  CHECK(std::isinf(bm_mct_unconstrained(1, 2, 1, r)));
  // leading order ln E = b sqrt(r) - ln r
  CHECK(lu == doctest::Approx(2 * std::sqrt(r) - std::log(r)).epsilon(1e-6));
  CHECK(std::isfinite(log_rtp_mct_unconstrained(1, 1, 1, 1e4)));
  CHECK(std::isfinite(log_rtp_mct_constrained(1, 1, 1, 1e4)));
  // moderate rates: log and plain agree
  CHECK(close(std::exp(log_bm_mct_unconstrained(1, 2, 1, 3)), bm_mct_unconstrained(1, 2, 1, 3),
              1e-14));
}

TEST_CASE("constrained Brownian mean has the free-diffusion limit as r -> 0") {
  // exit ab/2D, then one reflected crossing (a+b)^2/2D
  const double a = 1, b = 2, D = 1;
  CHECK(bm_mct_constrained(a, b, D, 1e-9) ==
        doctest::Approx(a * b / (2 * D) + (a + b) * (a + b) / (2 * D)).epsilon(1e-6));
  // the unconstrained mean diverges
  CHECK(bm_mct_unconstrained(a, b, D, 1e-8) > 1e3);
}

TEST_CASE("run-and-tumble ballistic limit gamma -> 0") {
  // Without tumbling every excursion is a straight line with a fair
  // direction: exit mean (e^y - 1)/r and escape leg 2 e^y / r, y = r a / v.
  const double a = 1.5, v = 2, r = 0.7, y = r * a / v;
  const auto c = rtp_components(a, v, 1e-12, r);
  CHECK(c.interval_exit_mean == doctest::Approx(std::expm1(y) / r).epsilon(1e-9));
  CHECK(c.escape_leg == doctest::Approx(2 * std::exp(y) / r).epsilon(1e-9));
  CHECK(rtp_mct_unconstrained_exact(a, v, 1e-12, r) ==
        doctest::Approx((std::expm1(y) + 2 * std::exp(y)) / r).epsilon(1e-9));
}

TEST_CASE("run-and-tumble diffusive limit gamma -> inf") {
  // D = v^2 / (2 gamma) = 1
  const double g = 1e3, v = std::sqrt(2 * g), r = 2;
  const double bm = bm_mct_unconstrained(1, 1, 1, r);
  CHECK(std::abs(rtp_mct_unconstrained_exact(1, v, g, r) / bm - 1) < 0.1);
  // the published unconstrained form keeps its undershoot in this limit
  CHECK(rtp_mct_unconstrained(1, v, g, r) < rtp_mct_unconstrained_exact(1, v, g, r));
  CHECK(std::abs(rtp_mct_constrained(1, v, g, r) / bm_mct_constrained(1, 1, 1, r) - 1) < 0.1);
}

TEST_CASE("domain entry points") {
  const auto clock = ResetClock::exponential(1.0);
  const IntervalTarget free{1.0, 2.0};
  CHECK(std::exp(log_mean_cover_time(BrownianSpec{1.0}, free, clock)) ==
        doctest::Approx(oracle::bm_unc_a1_b2_r1).epsilon(1e-13));
  // detection radius shrinks the interval
  const IntervalTarget padded{1.25, 2.25, false, 0.25};
  CHECK(std::exp(log_mean_cover_time(BrownianSpec{1.0}, padded, clock)) ==
        doctest::Approx(oracle::bm_unc_a1_b2_r1).epsilon(1e-13));
  const IntervalTarget walls{1.0, 1.0, true};
  const RtpSpec rtp{1.0, 1.0};
  CHECK(std::exp(log_mean_cover_time(rtp, walls, ResetClock::exponential(2.0))) ==
        doctest::Approx(oracle::rtp_con_ode_a1p0_v1p0_g1p0_r2p0).epsilon(1e-13));
  CHECK(std::exp(log_mean_cover_time(rtp, IntervalTarget{1.0, 1.0},
                                     ResetClock::exponential(2.0), RtpFormula::Exact)) ==
        doctest::Approx(oracle::rtp_unc_ode_a1p0_v1p0_g1p0_r2p0).epsilon(1e-13));

  CHECK_THROWS_AS(log_mean_cover_time(BrownianSpec{1.0}, free, ResetClock::deterministic(1.0)),
                  ValidationError);
  CHECK_THROWS_AS(log_mean_cover_time(rtp, IntervalTarget{1.0, 2.0}, clock), ValidationError);
  CHECK_THROWS_AS(bm_mct_unconstrained(1, 2, 1, 0), ValidationError);
  CHECK_THROWS_AS(bm_mct_unconstrained(-1, 2, 1, 1), ValidationError);
}

TEST_CASE("success probability asymptotics") {
  const auto bm = AsymptoticSetting::bm1d(1, 2, 1);
  CHECK(log_success_prob_asymptotic(bm, 9.0) == doctest::Approx(-6.0));
  CHECK(bm.far_points() == FarPoints::One);
  CHECK(AsymptoticSetting::bm1d(1, 1, 1).far_points() == FarPoints::TwoSymmetric);

  const auto rtp = AsymptoticSetting::rtp1d(2, 1, 0.5);
  CHECK(log_success_prob_asymptotic(rtp, 3.0) == doctest::Approx(-7.0 - std::log(2.0)));
  CHECK(rtp.far_points() == FarPoints::TwoSymmetric);

  const auto ball = AsymptoticSetting::ball(1.5, 0.5, 1, 3);
  CHECK(log_success_prob_asymptotic(ball, 16.0) == doctest::Approx(-2.0));
  const auto torus = AsymptoticSetting::torus(3, 0.5, 1, 2);
  CHECK(log_success_prob_asymptotic(torus, 16.0) == doctest::Approx(-4.0));

  CHECK(far_points_prefactor(FarPoints::One, 3) == 1.0);
  CHECK(far_points_prefactor(FarPoints::TwoSymmetric, 1) == 1.5);
  CHECK(far_points_prefactor(FarPoints::TwoSymmetric, 2) == 1.75);

  // m! prefactor / (r p)^m
  CHECK(mct_frequent_reset_approx(2, 10.0, std::log(0.1), 1.75) == doctest::Approx(3.5));
}

TEST_CASE("subdiffusion exponent reduces to Brownian motion at alpha -> 1") {
  const double L = 1.3, D = 0.8;
  const auto e = subdiffusion_exponent(L, D, 1.0 - 1e-10);
  CHECK(e.beta == doctest::Approx(1.0));
  CHECK(e.gamma == doctest::Approx(L / std::sqrt(D)).epsilon(1e-8));
  const auto sub = AsymptoticSetting::subdiffusion(L, D, 1.0 - 1e-10);
  CHECK(log_success_prob_asymptotic(sub, 4.0) ==
        doctest::Approx(-L * std::sqrt(4.0 / D)).epsilon(1e-8));
  CHECK_THROWS_AS(subdiffusion_exponent(L, D, 1.0), ValidationError);
  CHECK_THROWS_AS(subdiffusion_exponent(L, D, 0.0), ValidationError);
}

TEST_CASE("optimal rate estimates") {
  CHECK(optimal_rate_estimate(AsymptoticSetting::bm1d(1, 2, 1)) == doctest::Approx(1.0));
  CHECK(optimal_rate_estimate(AsymptoticSetting::ball(1.5, 0.5, 1, 3)) == doctest::Approx(16.0));
  CHECK(optimal_rate_estimate(AsymptoticSetting::rtp1d(2, 1, 0.5)) == doctest::Approx(0.5));
  // every estimate solves 1/r = -d/dr ln p
  for (const auto& s : {AsymptoticSetting::bm1d(1, 3, 2), AsymptoticSetting::torus(4, 0.5, 1, 2),
                        AsymptoticSetting::subdiffusion(1.2, 1.0, 0.5),
                        AsymptoticSetting::subdiffusion(2.0, 0.5, 0.8)}) {
    const double r = optimal_rate_estimate(s), h = 1e-6 * r;
    const double slope =
        (log_success_prob_asymptotic(s, r + h) - log_success_prob_asymptotic(s, r - h)) / (2 * h);
    CHECK(-slope == doctest::Approx(1.0 / r).epsilon(1e-6));
  }
}
