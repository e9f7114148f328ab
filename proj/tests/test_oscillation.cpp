#include <cmath>
#include <cstdint>

#include "cedf/errors.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "cedf/oscillation.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cedf;

namespace {

ChernoffFunction unit_abs_chern() {
  return ChernoffFunction(
      absolute_laplace_transform(ModelSpec::constant(1, 1, {0.25}, {1.0})));
}

}  // namespace

TEST_SUITE("test_oscillation") {

TEST_CASE("grid resolution M = 1 + ceil(3/((sqrt(2)-1) delta))") {
  CHECK(oscillation_grid_m(0.1) == 74);
  CHECK(oscillation_grid_m(0.2) == 38);
  CHECK(oscillation_grid_m(0.4) == 20);
  // Recompute independently for a few more values.
  for (double d : {0.05, 0.15, 0.41}) {
    const int want = 1 + static_cast<int>(std::ceil(3.0 / ((std::sqrt(2.0) - 1.0) * d)));
    CHECK(oscillation_grid_m(d) == want);
  }
}

TEST_CASE("analytic bound follows its closed form") {
  const ChernoffFunction chern = unit_abs_chern();
  for (double delta : {0.1, 0.2, 0.4}) {
    for (double x : {1.5, 2.0, 3.0}) {
      for (double nhf : {5.0, 20.0}) {
        for (int d : {1, 2}) {
          const double grid_want =
              std::pow(10.0 / delta, d) * std::exp(-d * delta * nhf * oracle::h1(x));
          CHECK(oscillation_bound(delta, x, nhf, chern, d) ==
                doctest::Approx(grid_want).epsilon(1e-10));
          const double global_want = std::exp(-nhf * oracle::h1(x));
          CHECK(oscillation_bound(delta, x, nhf, chern, d, OscillationBoundMode::kGlobal) ==
                doctest::Approx(global_want).epsilon(1e-10));
        }
      }
    }
  }
  // h(x) = 0 at the mean: vacuous bound, still returned.
  CHECK(oscillation_bound(0.2, 1.0, 10.0, chern, 1) >= 1.0);
  // The threshold domain is x >= 0.
  CHECK_THROWS_AS(oscillation_bound(0.2, -1.0, 10.0, chern, 1), config_error);
  // delta outside (0, sqrt(2)-1] is rejected.
  CHECK_THROWS_AS(oscillation_bound(0.45, 2.0, 10.0, chern, 1), config_error);
  CHECK_THROWS_AS(oscillation_bound(0.0, 2.0, 10.0, chern, 1), config_error);
}

TEST_CASE("x = 0 Monte Carlo tail equals the void probability, d = 1") {
  // At x = 0 the oscillation event is "an atom lands in the visible part of
  // the window", whose exact probability is 1 - exp(-n h (M-1)/M) for the
  // uniform law (f = 1).
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const double h = 0.1, delta = 0.2;
  const std::uint64_t n = 50, reps = 20000;
  const int em = oscillation_grid_m(delta);
  const double exact =
      1.0 - std::exp(-static_cast<double>(n) * h * (em - 1.0) / em);
  const OscillationReport rep = mc_oscillation_tail(m, h, n, delta, 0.0, reps, 11112, 2);
  const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(reps));
  CHECK(std::fabs(rep.empirical_tail - exact) < 4.0 * sigma);
  CHECK(rep.replications == reps);
}

TEST_CASE("x = 0 Monte Carlo tail equals the void probability, d = 2") {
  const ModelSpec m = ModelSpec::constant(1, 2, {0.2, 0.2}, {1.0});
  const double h = 0.04, delta = 0.4;  // window edge 0.2
  const std::uint64_t n = 50, reps = 20000;
  const int em = oscillation_grid_m(delta);
  const double frac = (em - 1.0) / em;
  const double exact = 1.0 - std::exp(-static_cast<double>(n) * h * frac * frac);
  const OscillationReport rep = mc_oscillation_tail(m, h, n, delta, 0.0, reps, 2223, 2);
  const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(reps));
  CHECK(std::fabs(rep.empirical_tail - exact) < 4.0 * sigma);
}

TEST_CASE("Monte Carlo tail respects the analytic bound when it binds") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const double h = 0.1, delta = 0.4, x = 3.0;
  const std::uint64_t n = 200, reps = 20000;  // nhf = 20
  const OscillationReport rep = mc_oscillation_tail(m, h, n, delta, x, reps, 90802, 2);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.analytic_bound ==
        doctest::Approx(25.0 * std::exp(-0.4 * 20.0 * oracle::h1(3.0))).epsilon(1e-10));
  const double slack =
      4.0 * std::sqrt(std::max(rep.analytic_bound, 1e-12) / static_cast<double>(reps)) +
      10.0 / static_cast<double>(reps);
  CHECK(rep.empirical_tail <= rep.analytic_bound + slack);
}

TEST_CASE("vacuous flag marks thresholds where the rate vanishes") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  // Unit marks: h1 vanishes exactly at the mean x = 1.
  const OscillationReport at_mean = mc_oscillation_tail(m, 0.1, 20, 0.2, 1.0, 500, 42, 1);
  CHECK(at_mean.vacuous);
  // Below the mean the bound is weak (h1(0.5) = 0.153) but not vacuous.
  const OscillationReport below = mc_oscillation_tail(m, 0.1, 20, 0.2, 0.5, 500, 42, 1);
  CHECK_FALSE(below.vacuous);
}

TEST_CASE("Monte Carlo tail is deterministic in seed and jobs") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const OscillationReport a = mc_oscillation_tail(m, 0.1, 50, 0.2, 2.0, 4000, 999, 1);
  const OscillationReport b = mc_oscillation_tail(m, 0.1, 50, 0.2, 2.0, 4000, 999, 3);
  CHECK(a.empirical_tail == b.empirical_tail);
  CHECK(a.seed == 999);
}

TEST_CASE("oscillation_to_csv carries one row per report") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const OscillationReport rep = mc_oscillation_tail(m, 0.1, 20, 0.2, 2.0, 200, 7, 1);
  const auto t = oscillation_to_csv({rep, rep});
  CHECK(t.rows() == 2);
  CHECK(t.header()[0] == "delta");
}

TEST_CASE("calibrate_h_x finds the largest fitting dyadic bandwidth") {
  // Uniform Z, unit marks: the drift is exactly zero as soon as the window
  // plus its slab extension 1 + shift fits inside [0,1) on every axis, and
  // the truncated cases overshoot the sqrt(2)-1 tolerance by hand
  // computation. z = 0.25: 0.25 + 0.5 (1 + shift) <= 1 for both deltas.
  const ModelSpec quarter = ModelSpec::constant(1, 1, {0.25}, {1.0});
  CHECK(calibrate_h_x(quarter, 0.2, 2.0) == 0.5);
  CHECK(calibrate_h_x(quarter, 0.4, 2.0) == 0.5);

  // z = 0.5: h = 0.5 truncates (worst slab drift 0.9 >= sqrt(2)-1) but
  // 0.5 + 0.25 * 1.45 = 0.8625 fits -> 0.25.
  const ModelSpec half = ModelSpec::constant(1, 1, {0.5}, {1.0});
  CHECK(calibrate_h_x(half, 0.4, 2.0) == 0.25);

  // The result is always a (negative) power of two.
  const double hx = calibrate_h_x(quarter, 0.1, 1.5);
  const double l2 = -std::log2(hx);
  CHECK(l2 == doctest::Approx(std::round(l2)).epsilon(1e-12));

  // x at or below the mean of |Y| has no positive tilt.
  CHECK_THROWS_AS(calibrate_h_x(quarter, 0.2, 1.0), config_error);
  CHECK_THROWS_AS(calibrate_h_x(quarter, 0.2, 0.5), config_error);

  // Location-dependent marks are calibrated in one dimension only.
  const ModelSpec sp2 =
      ModelSpec::gaussian(1, 2, {0.5, 0.5}, {1.0}, {1.0}, {0.3});
  CHECK_THROWS_AS(calibrate_h_x(sp2, 0.2, 3.0), model_error);
  const ModelSpec sp1 = ModelSpec::gaussian(1, 1, {0.25}, {1.0}, {1.0}, {0.3});
  const double hs = calibrate_h_x(sp1, 0.2, 3.0);
  CHECK(hs > 0.0);
  CHECK(hs < 1.0);
}

}  // TEST_SUITE
