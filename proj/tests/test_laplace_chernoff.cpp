#include <cmath>
#include <limits>
#include <vector>

#include "cedf/chernoff.hpp"
#include "cedf/errors.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cedf;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Dense grid search for sup_t t*u - (L(t) - 1) in one dimension: the
// independent oracle for the Newton ascent.
double grid_conjugate(const std::function<double(double)>& laplace1, double u, double t_lo,
                      double t_hi, double step) {
  double best = 0.0;  // t = 0 always yields 0
  for (double t = t_lo; t <= t_hi; t += step) {
    const double v = t * u - (laplace1(t) - 1.0);
    if (v > best) best = v;
  }
  return best;
}

// Bisection root of a continuous monotone function on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("test_laplace_chernoff") {

TEST_CASE("laplace_transform closed forms: constant marks") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {2.0});
  const LaplaceTransform lt = laplace_transform(m);
  CHECK(lt.dim == 1);
  CHECK(lt.mean == std::vector<double>{2.0});
  for (double t : {-1.0, 0.0, 0.7}) {
    CHECK(lt.eval({t}) == doctest::Approx(std::exp(2.0 * t)).epsilon(1e-14));
    CHECK(lt.grad({t})[0] == doctest::Approx(2.0 * std::exp(2.0 * t)).epsilon(1e-14));
  }
  CHECK(lt.eval({0.0}) == 1.0);

  const ModelSpec m2 = ModelSpec::constant(2, 1, {0.5}, {1.0, -3.0});
  const LaplaceTransform lt2 = laplace_transform(m2);
  CHECK(lt2.dim == 2);
  CHECK(lt2.eval({0.2, 0.1}) == doctest::Approx(std::exp(0.2 - 0.3)).epsilon(1e-14));
}

TEST_CASE("laplace_transform closed forms: gaussian marks at the center") {
  // Conditional law at z = 0.5 is Normal(1 + 2*0.5, 0.7^2) = Normal(2, 0.49).
  const ModelSpec m = ModelSpec::gaussian(1, 1, {0.5}, {1.0}, {2.0}, {0.7});
  const LaplaceTransform lt = laplace_transform(m);
  CHECK(lt.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
  for (double t : {-0.8, 0.0, 0.5, 1.3}) {
    const double want = std::exp(2.0 * t + 0.5 * 0.49 * t * t);
    CHECK(lt.eval({t}) == doctest::Approx(want).epsilon(1e-13));
    CHECK(lt.grad({t})[0] == doctest::Approx((2.0 + 0.49 * t) * want).epsilon(1e-12));
  }
}

TEST_CASE("laplace_transform quadrature agrees with the triangular MGF") {
  const ModelSpec m = ModelSpec::bounded(1, 1, {0.5}, {-0.5}, {2.0});
  const LaplaceTransform lt = laplace_transform(m);
  CHECK(lt.mean[0] == doctest::Approx(0.75).epsilon(1e-10));
  for (double t : {-1.2, 0.3, 2.0}) {
    CHECK(lt.eval({t}) == doctest::Approx(oracle::triangular_mgf(t, -0.5, 2.0)).epsilon(1e-9));
  }
  CHECK(lt.eval({0.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("absolute_laplace_transform: constant and folded-normal closed forms") {
  const ModelSpec m2 = ModelSpec::constant(2, 1, {0.5}, {3.0, 4.0});
  const LaplaceTransform abs2 = absolute_laplace_transform(m2);
  CHECK(abs2.dim == 1);
  CHECK(abs2.mean[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(abs2.eval({0.3}) == doctest::Approx(std::exp(1.5)).epsilon(1e-13));

  const ModelSpec g = ModelSpec::gaussian(1, 1, {0.5}, {1.0}, {0.0}, {0.5});
  const LaplaceTransform ag = absolute_laplace_transform(g);
  CHECK(ag.eval({0.7}) == doctest::Approx(oracle::folded_normal_mgf(0.7, 1.0, 0.5)).epsilon(1e-9));
  CHECK(ag.eval({0.7}) == doctest::Approx(2.146972820965655).epsilon(1e-9));

  const ModelSpec g2 = ModelSpec::gaussian(1, 1, {0.5}, {0.2}, {0.0}, {1.0});
  const LaplaceTransform ag2 = absolute_laplace_transform(g2);
  CHECK(ag2.eval({1.3}) == doctest::Approx(4.368990161227017).epsilon(1e-9));

  // k > 1 is shipped only for constant marks.
  const ModelSpec gk2 = ModelSpec::gaussian(2, 1, {0.5}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(absolute_laplace_transform(gk2), model_error);
}

TEST_CASE("absolute_laplace_transform: bounded marks vs independent Simpson") {
  const ModelSpec m = ModelSpec::bounded(1, 1, {0.5}, {-0.5}, {2.0});
  const LaplaceTransform at = absolute_laplace_transform(m);
  auto dens = [](double y) {
    const double c = 1.25, mid = 0.75;
    return (c - std::fabs(y - mid)) / (c * c);
  };
  for (double t : {0.4, 1.1}) {
    const double want =
        oracle::simpson([&](double y) { return std::exp(t * std::fabs(y)) * dens(y); }, -0.5, 2.0,
                        20000);
    CHECK(at.eval({t}) == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("conjugate of unit point marks is x log x - x + 1") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  for (double x : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    CHECK(chern.value1(x) == doctest::Approx(oracle::h1(x)).epsilon(1e-10));
  }
  // The boundary value h(0) = 1 is an unattained supremum (t -> -infinity)
  // and must still be reached exactly.
  CHECK(chern.value1(0.0) == 1.0);
  CHECK(chern.value1(-0.5) == kInf);
  const ChernoffResult at_mean = chern.eval({1.0});
  CHECK(at_mean.value == 0.0);
  CHECK(at_mean.argmax == std::vector<double>{0.0});
  CHECK_FALSE(at_mean.diverged);
}

TEST_CASE("gaussian conjugate agrees with a dense grid search") {
  const ModelSpec m = ModelSpec::gaussian(1, 1, {0.5}, {0.3}, {0.0}, {1.2});
  const ChernoffFunction chern(laplace_transform(m));
  auto lap1 = [](double t) { return std::exp(0.3 * t + 0.5 * 1.44 * t * t); };
  for (double u : {-2.0, -0.5, 0.3, 1.7, 4.0}) {
    const double want = grid_conjugate(lap1, u, -8.0, 8.0, 1e-4);
    CHECK(chern.value1(u) == doctest::Approx(want).epsilon(5e-7));
  }
  CHECK(chern.value1(0.3) == 0.0);  // the mean
}

TEST_CASE("vector conjugate: ray values and off-ray divergence for point marks") {
  const ModelSpec m = ModelSpec::constant(2, 1, {0.5}, {1.0, 2.0});
  const ChernoffFunction chern(laplace_transform(m));
  CHECK(chern.value({1.0, 2.0}) == 0.0);
  // u = 2 y0: sup over v = <t, y0> of 2v - e^v + 1 = 2 log 2 - 1 = h1(2).
  CHECK(chern.value({2.0, 4.0}) == doctest::Approx(oracle::h1(2.0)).epsilon(1e-6));
  // Off the ray no mass can realize u: the ascent must certify +infinity.
  const ChernoffResult off = chern.eval({1.0, 1.0});
  CHECK(off.diverged);
  CHECK(chern.value({1.0, 1.0}) == kInf);
}

TEST_CASE("bounded marks keep a finite conjugate beyond their range") {
  const ModelSpec m = ModelSpec::bounded(1, 1, {0.5}, {0.0}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  const ChernoffResult res = chern.eval({3.0});
  CHECK_FALSE(res.diverged);
  CHECK(res.value > 0.0);
  CHECK(std::isfinite(res.value));
}

TEST_CASE("eval validates arity and tolerance") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  CHECK_THROWS_AS(chern.eval({1.0, 2.0}), config_error);
  CHECK_THROWS_AS(chern.eval({1.0}, -1.0), config_error);
  const ChernoffFunction vec(
      laplace_transform(ModelSpec::constant(2, 1, {0.5}, {1.0, 1.0})));
  CHECK_THROWS_AS(vec.value1(1.0), config_error);
  CHECK_THROWS_AS(chernoff_level_roots(vec, 0.5), config_error);
}

TEST_CASE("level roots match test-side bisection of the closed form") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  const double level = std::log(2.0) - 0.5;
  const LevelRoots roots = chernoff_level_roots(chern, level);
  REQUIRE(roots.lower.has_value());
  REQUIRE(roots.upper.has_value());
  const double want_lo = bisect([&](double x) { return oracle::h1(x) - level; }, 1e-9, 1.0);
  const double want_hi = bisect([&](double x) { return oracle::h1(x) - level; }, 1.0, 10.0);
  CHECK(*roots.lower == doctest::Approx(want_lo).epsilon(2e-6));
  CHECK(*roots.upper == doctest::Approx(want_hi).epsilon(2e-6));

  // At level 1/2 the two slopes solving h1(x) = 1/2 are the classic pair.
  const LevelRoots half = chernoff_level_roots(chern, 0.5);
  REQUIRE(half.lower.has_value());
  REQUIRE(half.upper.has_value());
  CHECK(*half.lower == doctest::Approx(0.1866823).epsilon(1e-4));
  CHECK(*half.upper == doctest::Approx(2.1555352).epsilon(1e-4));

  // Symmetric transform -> symmetric roots.
  const ModelSpec g = ModelSpec::gaussian(1, 1, {0.5}, {0.0}, {0.0}, {1.0});
  const ChernoffFunction cg(laplace_transform(g));
  const LevelRoots sym = chernoff_level_roots(cg, 0.5);
  REQUIRE(sym.lower.has_value());
  REQUIRE(sym.upper.has_value());
  CHECK(*sym.lower == doctest::Approx(-*sym.upper).epsilon(1e-6));
}

TEST_CASE("superlinearity certificate tabulates h(Re)/R") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  const SuperlinearityReport rep =
      superlinearity_certificate(chern, {4.0, 8.0}, {{1.0}});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].ratio == doctest::Approx(oracle::h1(4.0) / 4.0).epsilon(1e-8));
  CHECK(rep.rows[1].ratio == doctest::Approx(oracle::h1(8.0) / 8.0).epsilon(1e-8));
  CHECK(rep.passes);

  const SuperlinearityReport strict =
      superlinearity_certificate(chern, {4.0, 8.0}, {{1.0}}, 1.3);
  CHECK_FALSE(strict.passes);

  // A direction where h diverges immediately passes outright.
  const SuperlinearityReport neg =
      superlinearity_certificate(chern, {1.0, 2.0}, {{-1.0}});
  CHECK(neg.passes);
  REQUIRE(!neg.rows.empty());
  CHECK(neg.rows.front().unbounded);
}

TEST_CASE("certified_tv_radius returns the first certified power of two") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const ChernoffFunction chern(laplace_transform(m));
  // Chord criterion h(R) >= R + 1: fails at 4 (2.545 < 5), holds at 8
  // (9.6355 >= 9, left side diverges).
  const double r = certified_tv_radius(chern);
  CHECK(r == 8.0);
  CHECK(chern.value1(r) >= r);

  const ModelSpec g = ModelSpec::gaussian(1, 1, {0.5}, {0.0}, {0.0}, {1.0});
  const ChernoffFunction cg(laplace_transform(g));
  // h(4) = 3.94 < 4 but h(8) = 10.38 >= 8.
  CHECK(certified_tv_radius(cg) == 8.0);
}

}  // TEST_SUITE
