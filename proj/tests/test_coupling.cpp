#include <boost/math/distributions/poisson.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cedf/coupling.hpp"
#include "cedf/errors.hpp"
#include "cedf/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cedf;

namespace {

double tilt_cdf(double gamma, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u + 0.5 * gamma * u * (u - 1.0);
}

// Auxiliary law of v: P(0) = 1 - (1 - e^{-p})/p, P(m) = p^{m-1} e^{-p}/m!.
double v_pmf(double p, int m) {
  if (m == 0) return 1.0 - (1.0 - std::exp(-p)) / p;
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return std::pow(p, m - 1) * std::exp(-p) / f;
}

}  // namespace

TEST_SUITE("test_coupling") {

TEST_CASE("mismatch probability follows the closed form and the p^2 cap") {
  for (double p : {0.01, 0.1, 0.3, 0.9}) {
    const double want = p * (1.0 - std::exp(-p));
    CHECK(coupling_mismatch_prob(p) == doctest::Approx(want).epsilon(1e-15));
    CHECK(coupling_mismatch_prob(p) <= p * p);
  }
  CHECK_THROWS_AS(coupling_mismatch_prob(0.0), config_error);
  CHECK_THROWS_AS(coupling_mismatch_prob(1.5), config_error);
}

TEST_CASE("sample_coupling_v matches the auxiliary pmf (chi-squared)") {
  const double p = 0.3;
  Rng rng(321321);
  const int n = 30000;
  const int cap = 4;  // bins 0..3 plus tail
  std::vector<double> observed(cap + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = sample_coupling_v(rng, p);
    observed[static_cast<std::size_t>(std::min<std::uint64_t>(v, cap))] += 1.0;
  }
  std::vector<double> expected(cap + 1, 0.0);
  double head = 0.0;
  for (int m = 0; m < cap; ++m) {
    expected[static_cast<std::size_t>(m)] = n * v_pmf(p, m);
    head += v_pmf(p, m);
  }
  expected[cap] = n * (1.0 - head);
  CHECK(oracle::chi2_statistic(observed, expected) < oracle::chi2_critical_1pct(cap));
}

TEST_CASE("eta_star is exactly Poisson and matches encode the coupling event") {
  // Uniform Z with h = p = 0.3: window [0.25, 0.55) has mass exactly 0.3.
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const BandwidthSchedule sched = BandwidthSchedule::custom(std::vector<double>(20000, 0.3));
  const auto seq = build_coupling(m, sched, 20000, 777001);
  REQUIRE(seq.size() == 20000);

  std::vector<long> etas;
  std::uint64_t mismatches = 0;
  std::uint64_t b_count = 0;
  for (const auto& r : seq) {
    CHECK(r.h == 0.3);
    CHECK(r.p_window == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(r.match == (r.eta_star == static_cast<std::uint64_t>(r.b ? 1 : 0)));
    CHECK(r.locs.size() == (r.eta_star + r.n_background));
    CHECK(r.ys.size() == (r.eta_star + r.n_background));
    CHECK(r.z_emp.size() == 1);
    const bool emp_inside = (r.z_emp[0] >= 0.25 && r.z_emp[0] < 0.55);
    CHECK(emp_inside == r.b);
    for (std::uint64_t j = 0; j < r.eta_star; ++j) {
      CHECK(r.locs[j] >= 0.25);
      CHECK(r.locs[j] < 0.55);
    }
    for (std::uint64_t j = r.eta_star; j < r.eta_star + r.n_background; ++j) {
      const bool inside = (r.locs[j] >= 0.25 && r.locs[j] < 0.55);
      CHECK_FALSE(inside);
    }
    if (r.b && r.eta_star >= 1) {
      // The empirical pair is the shared first inside atom, bit for bit.
      CHECK(r.z_emp[0] == r.locs[0]);
      CHECK(r.y_emp[0] == r.ys[0]);
    }
    etas.push_back(static_cast<long>(r.eta_star));
    if (!r.match) ++mismatches;
    if (r.b) ++b_count;
  }

  // eta* ~ Poisson(0.3) exactly.
  boost::math::poisson_distribution<double> ref(0.3);
  const int cap = 3;
  std::vector<double> observed(cap + 1, 0.0);
  for (long v : etas) observed[static_cast<std::size_t>(std::min<long>(v, cap))] += 1.0;
  std::vector<double> expected(cap + 1, 0.0);
  double head = 0.0;
  for (int k = 0; k < cap; ++k) {
    expected[static_cast<std::size_t>(k)] = 20000.0 * boost::math::pdf(ref, k);
    head += boost::math::pdf(ref, k);
  }
  expected[cap] = 20000.0 * (1.0 - head);
  CHECK(oracle::chi2_statistic(observed, expected) < oracle::chi2_critical_1pct(cap));

  // b ~ Bernoulli(0.3) and P(mismatch) = 0.3 (1 - e^{-0.3}), within 4 sigma.
  const double b_freq = static_cast<double>(b_count) / 20000.0;
  CHECK(std::fabs(b_freq - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / 20000.0));
  const double mm = coupling_mismatch_prob(0.3);
  const double mm_freq = static_cast<double>(mismatches) / 20000.0;
  CHECK(std::fabs(mm_freq - mm) < 4.0 * std::sqrt(mm * (1.0 - mm) / 20000.0));
}

TEST_CASE("derived empirical location keeps the marginal law under a tilt") {
  const ModelSpec m = ModelSpec::bounded(1, 1, {0.25}, {0.0}, {1.0}, {0.6});
  const BandwidthSchedule sched = BandwidthSchedule::custom(std::vector<double>(20000, 0.3));
  const auto seq = build_coupling(m, sched, 20000, 55555);
  std::vector<double> zs;
  zs.reserve(seq.size());
  for (const auto& r : seq) zs.push_back(r.z_emp[0]);
  CHECK(oracle::ks_statistic(zs, [](double u) { return tilt_cdf(0.6, u); }) <
        oracle::ks_critical(zs.size()));
}

TEST_CASE("any prefix of the coupled sequence is reproducible") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const BandwidthSchedule sched = BandwidthSchedule::nonstandard(2.0);
  const auto a = build_coupling(m, sched, 50, 4321);
  const auto b = build_coupling(m, sched, 50, 4321);
  const auto c = build_coupling(m, sched, 20, 4321);
  REQUIRE(a.size() == 50);
  REQUIRE(c.size() == 20);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a[i].locs == b[i].locs);
    CHECK(a[i].eta_star == b[i].eta_star);
  }
  // Independent per-index seeds: shrinking n_max must not change the prefix.
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(a[i].index == c[i].index);
    CHECK(a[i].h == c[i].h);
    CHECK(a[i].b == c[i].b);
    CHECK(a[i].v == c[i].v);
    CHECK(a[i].z_emp == c[i].z_emp);
    CHECK(a[i].locs == c[i].locs);
  }
}

TEST_CASE("mismatch probabilities are summable along the (HV) schedule") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.25}, {1.0});
  const BandwidthSchedule sched = BandwidthSchedule::nonstandard(1.0);
  double tail = 0.0;
  for (std::uint64_t n = 10000; n <= 100000; ++n) {
    const double p = m.window_prob(bandwidth(sched, n));
    tail += coupling_mismatch_prob(p);
  }
  // sum p_n^2 with p_n ~ log log n / n: the 10^4..10^5 block is tiny.
  CHECK(tail < 1e-3);
}

}  // TEST_SUITE
