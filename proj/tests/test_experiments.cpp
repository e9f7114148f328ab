#include <boost/math/distributions/poisson.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cedf/errors.hpp"
#include "cedf/experiments.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cedf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ModelSpec unit_model() { return ModelSpec::constant(1, 1, {0.25}, {1.0}); }

// -(1/nhf) log P(Poisson(nhf * lambda) >= ceil(x * nhf)) via boost.
double ldp_exact_reference(double nhf, double lambda, double x) {
  boost::math::poisson_distribution<double> pois(nhf * lambda);
  const double k = std::ceil(x * nhf);
  const double tail = boost::math::cdf(boost::math::complement(pois, k - 1.0));
  return -std::log(tail) / nhf;
}

}  // namespace

TEST_SUITE("test_experiments") {

TEST_CASE("ExperimentResult::write produces byte-stable artifacts") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cedf-expwrite-test";
  fs::remove_all(dir);

  csv::Table t({"a", "b"});
  t.add_row({"1", "2"});
  const ExperimentResult res{"demo", "00ff00ff00ff00ff", 42, t, "{\"seed\":42}\n"};
  CHECK(res.base_name() == "demo-00ff00ff00ff00ff-42");

  const std::string csv_path = res.write(dir.string());
  CHECK(csv_path == (dir / "demo-00ff00ff00ff00ff-42.csv").string());
  const std::string csv_bytes = slurp(csv_path);
  CHECK(csv_bytes == "a,b\n1,2\n");
  CHECK(slurp((dir / "demo-00ff00ff00ff00ff-42.json").string()) == "{\"seed\":42}\n");
  const std::string meta = slurp((dir / "demo-00ff00ff00ff00ff-42.meta").string());
  CHECK(meta.find("written=") != std::string::npos);
  // Timestamps never leak into the CSV/JSON bodies: a rerun is identical.
  res.write(dir.string());
  CHECK(slurp(csv_path) == csv_bytes);
  fs::remove_all(dir);
}

TEST_CASE("exact Poisson LDP ladder matches boost tail probabilities") {
  const auto rows =
      ldp_cell_check(unit_model(), 1.0, 2.0, {50.0, 100.0, 200.0, 400.0},
                     LdpMode::ExactPoisson, 0, 12345, 1);
  REQUIRE(rows.size() == 4);
  const double nhfs[] = {50.0, 100.0, 200.0, 400.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].nhf == nhfs[i]);
    CHECK(rows[i].value ==
          doctest::Approx(ldp_exact_reference(nhfs[i], 1.0, 2.0)).epsilon(1e-9));
    CHECK(rows[i].target == doctest::Approx(oracle::h1(2.0)).epsilon(1e-12));
    CHECK_FALSE(rows[i].unresolvable);
  }
  // The finite-n gap closes monotonically from above.
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(rows[i].value > rows[i].target);
    CHECK(rows[i].value < rows[i - 1].value);
  }

  // Fractional cell measure rescales both the Poisson mean and the target.
  const auto part =
      ldp_cell_check(unit_model(), 0.25, 0.5, {100.0}, LdpMode::ExactPoisson, 0, 1, 1);
  REQUIRE(part.size() == 1);
  CHECK(part[0].value == doctest::Approx(ldp_exact_reference(100.0, 0.25, 0.5)).epsilon(1e-9));
  CHECK(part[0].target == doctest::Approx(0.25 * oracle::h1(2.0)).epsilon(1e-12));
}

TEST_CASE("LDP mode preconditions") {
  const ModelSpec gauss = ModelSpec::gaussian(1, 1, {0.25}, {1.0}, {0.0}, {0.5});
  CHECK_THROWS_AS(
      ldp_cell_check(gauss, 1.0, 2.0, {50.0}, LdpMode::ExactPoisson, 0, 1, 1),
      config_error);
  const ModelSpec vec = ModelSpec::constant(2, 1, {0.25}, {1.0, 1.0});
  CHECK_THROWS_AS(
      ldp_cell_check(vec, 1.0, 2.0, {50.0}, LdpMode::MonteCarlo, 100, 1, 1),
      config_error);
}

TEST_CASE("Monte Carlo LDP agrees with the exact mode within its own error") {
  const auto exact =
      ldp_cell_check(unit_model(), 1.0, 1.3, {20.0}, LdpMode::ExactPoisson, 0, 1, 1);
  const auto mc =
      ldp_cell_check(unit_model(), 1.0, 1.3, {20.0}, LdpMode::MonteCarlo, 40000, 777, 2);
  REQUIRE(exact.size() == 1);
  REQUIRE(mc.size() == 1);
  REQUIRE_FALSE(mc[0].unresolvable);
  CHECK(mc[0].mc_error > 0.0);
  CHECK(std::fabs(mc[0].value - exact[0].value) < 4.0 * mc[0].mc_error);
}

TEST_CASE("unresolvable Monte Carlo tails are flagged, not faked") {
  const auto rows =
      ldp_cell_check(unit_model(), 1.0, 3.0, {50.0}, LdpMode::MonteCarlo, 1000, 99, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].unresolvable);
  CHECK(std::isnan(rows[0].value));
  const auto t = ldp_to_csv(rows, 99);
  bool saw = false;
  for (const auto& cell : t.row(0)) saw = saw || cell == "unresolvable";
  CHECK(saw);
}

TEST_CASE("clustering_run walks both block schedules deterministically") {
  const ModelSpec m = unit_model();
  const BandwidthSchedule sched = BandwidthSchedule::nonstandard(2.0);
  const ChernoffFunction chern(laplace_transform(m));
  const RateLevelSet set(chern, 0.5);

  ClusteringParams params;
  params.outer_k_min = 2;
  params.outer_k_max = 8;
  params.inner_k_min = 2;
  params.inner_k_max = 4;
  params.depth = 3;
  params.n_limit = 10000;  // budget for the outer trajectory (n(8) = 9 fits)

  const DyadicGrid grid(1, params.depth);
  std::vector<GridFunction> targets;
  targets.push_back(zero_rate_function(grid, chern));
  GridFunction slow(grid, 1);
  for (auto& v : slow.raw()) v = grid.cell_measure() * 1.5;  // J = h1(1.5) = 0.108
  REQUIRE(level_set_contains(slow, set));
  targets.push_back(slow);

  const ClusteringResult res =
      clustering_run(m, sched, BlockSchedule::outer(), BlockSchedule::inner(), set, targets,
                     params, 20260814);

  const BlockSchedule outer = BlockSchedule::outer();
  REQUIRE(res.outer.size() == 7);
  for (std::size_t i = 0; i < res.outer.size(); ++i) {
    const auto& row = res.outer[i];
    CHECK(row.k == i + 2);
    CHECK(row.n == outer.n(row.k));
    CHECK(row.h == bandwidth(sched, row.n));
    CHECK(row.distance >= 0.0);
    CHECK(std::isfinite(row.distance));
  }

  // Inner: every k in [2, 4], two targets each. The inner sampler draws the
  // window hit count directly, so astronomically long blocks stay cheap.
  REQUIRE(res.inner.size() == 6);
  for (const auto& row : res.inner) {
    CHECK(row.k >= 2);
    CHECK(row.k <= 4);
    CHECK(row.n == BlockSchedule::inner().n(row.k));
    CHECK(row.target < targets.size());
  }
  // Running minimum is per-target nonincreasing in k.
  for (std::size_t target = 0; target < 2; ++target) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : res.inner) {
      if (row.target != target) continue;
      CHECK(row.running_min <= prev + 1e-15);
      CHECK(row.running_min <= row.distance + 1e-15);
      prev = row.running_min;
    }
  }

  // Bitwise reproducibility.
  const ClusteringResult rerun =
      clustering_run(m, sched, BlockSchedule::outer(), BlockSchedule::inner(), set, targets,
                     params, 20260814);
  REQUIRE(rerun.outer.size() == res.outer.size());
  for (std::size_t i = 0; i < res.outer.size(); ++i) {
    CHECK(rerun.outer[i].distance == res.outer[i].distance);
  }

  // Targets must belong to the level set.
  GridFunction fast(grid, 1);
  for (auto& v : fast.raw()) v = grid.cell_measure() * 3.0;  // J = h1(3) = 1.296 > 0.5
  CHECK_THROWS_AS(clustering_run(m, sched, BlockSchedule::outer(), BlockSchedule::inner(), set,
                                 {fast}, params, 1),
                  config_error);

  // The trajectory budget guards the outer endpoint: n(80) ~ 1.9e4 > 10^4.
  ClusteringParams over = params;
  over.outer_k_max = 80;
  CHECK_THROWS_AS(clustering_run(m, sched, BlockSchedule::outer(), BlockSchedule::inner(), set,
                                 targets, over, 1),
                  config_error);

  const auto ot = clustering_outer_to_csv(res.outer, 1);
  CHECK(ot.rows() == res.outer.size());
  const auto it = clustering_inner_to_csv(res.inner, 1);
  CHECK(it.rows() == res.inner.size());
}

TEST_CASE("nw_estimate reproduces hand-computed kernel ratios") {
  const ModelSpec m = unit_model();
  SampleBatch batch;
  batch.n = 3;
  batch.k = 1;
  batch.d = 1;
  batch.zs = {0.30, 0.35, 0.90};
  batch.ys = {1.0, 3.0, 100.0};

  const NwEstimate box = nw_estimate(batch, m, Kernel::Box, 0.2);
  REQUIRE(box.defined);
  CHECK(box.value[0] == doctest::Approx(2.0).epsilon(1e-14));

  // Tent weights at u = {0.25, 0.5}: 0.5 and 1.0.
  const NwEstimate tri = nw_estimate(batch, m, Kernel::Triangle, 0.2);
  REQUIRE(tri.defined);
  CHECK(tri.value[0] == doctest::Approx(3.5 / 1.5).epsilon(1e-13));

  // Empty window: undefined, not zero.
  const NwEstimate empty = nw_estimate(batch, m, Kernel::Box, 0.01);
  CHECK_FALSE(empty.defined);

  CHECK(kernel_from_name("box") == Kernel::Box);
  CHECK(kernel_from_name(kernel_name(Kernel::Triangle)) == Kernel::Triangle);
  CHECK_THROWS_AS(kernel_from_name("epanechnikov"), config_error);
}

TEST_CASE("nw contrast on degenerate marks has zero oscillation") {
  const ModelSpec m = ModelSpec::constant(1, 1, {0.5}, {1.0});
  const NwContrastResult res =
      nw_inconsistency_contrast(m, 2.0, 1000, 20000, 8, Kernel::Box, 3, 99, 1);
  REQUIRE(!res.checkpoints.empty());
  CHECK(res.checkpoints.front() >= 1000);
  CHECK(res.checkpoints.back() <= 20000);
  for (std::size_t i = 1; i < res.checkpoints.size(); ++i) {
    CHECK(res.checkpoints[i] > res.checkpoints[i - 1]);
  }
  REQUIRE(res.rows.size() == 3);
  for (const auto& row : res.rows) {
    CHECK(row.osc_hv <= 1e-12);
    CHECK(row.osc_consistent <= 1e-12);
  }
  CHECK(res.median_osc_hv <= 1e-12);

  // jobs must not change anything.
  const NwContrastResult res4 =
      nw_inconsistency_contrast(m, 2.0, 1000, 20000, 8, Kernel::Box, 3, 99, 4);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    CHECK(res4.rows[i].osc_hv == res.rows[i].osc_hv);
    CHECK(res4.rows[i].osc_consistent == res.rows[i].osc_consistent);
  }

  const auto t = nw_contrast_to_csv(res, 99);
  CHECK(t.rows() == res.rows.size());
}

TEST_CASE("block discrepancy rows carry the documented analytic bound") {
  const ModelSpec m = unit_model();
  const BandwidthSchedule sched = BandwidthSchedule::nonstandard(2.0);
  const std::uint64_t k = 20;  // n_k = 34
  const double eps = 1.5;
  const auto rows = block_discrepancy_check(m, sched, k, eps, 3, 4000, 31415, 2);
  REQUIRE(!rows.empty());
  const BlockSchedule outer = BlockSchedule::outer();
  const std::uint64_t nk = outer.n(k);
  for (const auto& row : rows) {
    CHECK(row.k == k);
    CHECK(row.n_k == nk);
    CHECK(row.n < nk);
    CHECK(row.n >= outer.range(k).lo);
    CHECK(row.eps == eps);
    CHECK(row.replications == 4000);
    // Independent recompute of exp(-(n_k - n) h f h1(eps n_k / (n_k - n))).
    const double h = bandwidth(sched, nk);
    const double tail = static_cast<double>(nk - row.n);
    const double want = std::exp(-tail * h * 1.0 * oracle::h1(eps * nk / tail));
    CHECK(row.bound == doctest::Approx(want).epsilon(1e-10));
    // Monte Carlo frequency must respect the bound (with sampling slack).
    const double slack =
        4.0 * std::sqrt(std::max(std::min(row.bound, 1.0), 1e-12) * 1.0 / 4000.0) + 10.0 / 4000.0;
    CHECK(row.frequency <= row.bound + slack);
  }
  const auto t = block_discrepancy_to_csv(rows, 31415);
  CHECK(t.rows() == rows.size());
}

}  // TEST_SUITE
