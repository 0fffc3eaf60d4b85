#include <doctest.h>

#include <cmath>

#include "covertime/continuum.hpp"
#include "covertime/error.hpp"
#include "covertime/optimize.hpp"

using namespace covertime;

TEST_CASE("parabola in r") {
  const auto res = grid_minimize_mct([](double r) { return (r - 3) * (r - 3) + 1; }, 0.01, 100);
  CHECK(res.argmin == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(res.value == doctest::Approx(1.0));
  CHECK(res.evaluations > 32);
}

TEST_CASE("Brownian mean cover time has an interior optimum") {
  const auto res =
      grid_minimize_mct([](double r) { return bm_mct_unconstrained(1, 2, 1, r); }, 1e-3, 1e3);
  const double h = 1e-4 * res.argmin;
  CHECK(bm_mct_unconstrained(1, 2, 1, res.argmin) <= bm_mct_unconstrained(1, 2, 1, res.argmin + h));
  CHECK(bm_mct_unconstrained(1, 2, 1, res.argmin) <= bm_mct_unconstrained(1, 2, 1, res.argmin - h));
}

TEST_CASE("refusals") {
  // monotone: minimum on the edge
  CHECK_THROWS_AS(grid_minimize_mct([](double r) { return r; }, 0.1, 10), NumericRefusal);
  // two wells
  CHECK_THROWS_AS(grid_minimize_mct(
                      [](double r) {
                        const double x = std::log10(r);
                        return (x * x - 1) * (x * x - 1);
                      },
                      1e-2, 1e2),
                  NumericRefusal);
  CHECK_THROWS_AS(grid_minimize_mct([](double) { return NAN; }, 0.1, 10), NumericRefusal);
  CHECK_THROWS(grid_minimize_mct([](double r) { return r; }, 10, 0.1));
}
