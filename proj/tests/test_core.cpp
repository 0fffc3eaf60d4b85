#include <doctest.h>

#include <cmath>
#include <vector>

#include "covertime/error.hpp"
#include "covertime/reset_clock.hpp"
#include "covertime/rng.hpp"
#include "covertime/searchers.hpp"
#include "covertime/statistics.hpp"

using namespace covertime;

namespace {

std::vector<double> draws(const ResetClock& clock, int n, std::uint64_t seed = 7) {
  auto rng = make_stream(seed, 0);
  std::vector<double> out(n);
  for (auto& x : out) x = clock.sample(rng);
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

TEST_CASE("clock families have mean 1/r") {
  const int n = 1000000;
  for (auto clock : {ResetClock::exponential(2.0), ResetClock::gamma_unit_mean(4.0, 2.0),
                     ResetClock::gamma_unit_mean(0.5, 2.0)}) {
    const auto x = draws(clock, n);
    double var = 0, m = mean(x);
    for (double v : x) var += (v - m) * (v - m);
    var /= n - 1;
    // Var(Y / r) = 1 / (shape r^2)
    const double se = std::sqrt(var / n);
    CHECK(std::abs(m - 0.5) < 4 * se);
    CHECK(var == doctest::Approx(1.0 / (clock.shape() * 4.0)).epsilon(0.01));
    for (double v : x) REQUIRE(v > 0);
  }
  const auto det = draws(ResetClock::deterministic(4.0), 10);
  for (double v : det) CHECK(v == 0.25);
}

TEST_CASE("exponential clock passes a KS check") {
  const auto x = draws(ResetClock::exponential(3.0), 20000, 11);
  std::vector<double> scaled;
  for (double v : x) scaled.push_back(3.0 * v);
  // 1.63 / sqrt(n): 1% level
  CHECK(ks_distance_unit_exponential(scaled) < 1.63 / std::sqrt(20000.0));
}

TEST_CASE("clock validation") {
  CHECK_THROWS_AS(ResetClock::exponential(0.0), ValidationError);
  CHECK_THROWS_AS(ResetClock::exponential(-1.0), ValidationError);
  CHECK_THROWS_AS(ResetClock::deterministic(NAN), ValidationError);
  CHECK_THROWS_AS(ResetClock::gamma_unit_mean(0.0, 1.0), ValidationError);
  CHECK(ResetClock::exponential(1.5).describe() == "exponential(rate=1.5)");
}

TEST_CASE("streams are reproducible and distinct") {
  auto a = make_stream(42, 3), b = make_stream(42, 3), c = make_stream(42, 4),
       d = make_stream(43, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  auto u = make_stream(0, 0);
  for (int i = 0; i < 100000; ++i) {
    const double v = uniform_open_closed(u);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("accumulate_estimate") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m1 = accumulate_estimate(x, 1, 9);
  CHECK(m1.mean == doctest::Approx(2.5));
  // sample sd sqrt(5/3), / sqrt(4)
  CHECK(m1.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(m1.n_samples == 4);
  CHECK(m1.seed == 9);
  const auto m2 = accumulate_estimate(x, 2, 9);
  CHECK(m2.mean == doctest::Approx(7.5));
  CHECK(m2.order == 2);

  const std::vector<double> one{5};
  CHECK(accumulate_estimate(one, 1, 0, false).mean == 5);
  CHECK_THROWS_AS(accumulate_estimate(one, 1, 0, true), ValidationError);
  CHECK_THROWS_AS(accumulate_estimate(std::vector<double>{}, 1, 0), ValidationError);
  CHECK_THROWS_AS(accumulate_estimate(x, 0, 0), ValidationError);
}

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-9));
  CompensatedSum t;
  t.add(1e100);
  t.add(1.0);
  t.add(-1e100);
  CHECK(t.value() == 1.0);
}

TEST_CASE("ks distance") {
  // single sample at the median
  CHECK(ks_distance_unit_exponential({std::log(2.0)}) == doctest::Approx(0.5));
}

TEST_CASE("searcher and target validation") {
  CHECK_NOTHROW(BrownianSpec{1.0}.validate());
  CHECK_THROWS_AS(BrownianSpec{0.0}.validate(), ValidationError);
  CHECK_THROWS_AS((RtpSpec{-1.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((IntervalTarget{1.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((IntervalTarget{1.0, 2.0, false, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((IntervalTarget{1.0, 2.0, false, -0.1}.validate()), ValidationError);
  const IntervalTarget t{1.0, 2.0, false, 0.25};
  CHECK(t.effective_a() == 0.75);
  CHECK(t.effective_b() == 1.75);
}
