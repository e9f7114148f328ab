#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cedf/blocks.hpp"
#include "doctest.h"

using namespace cedf;

namespace {

// Raw outer exponent f(k) = k e^{-sqrt(log k)}; n_k = floor(e^{f(k)}) before
// the strict-increase forcing.
double outer_exponent(double k) { return k * std::exp(-std::sqrt(std::log(k))); }

}  // namespace

TEST_SUITE("test_blocks") {

TEST_CASE("inner endpoints are exact powers k^(2^k)") {
  const BlockSchedule s = BlockSchedule::inner();
  CHECK(s.n(1) == 1);
  CHECK(s.n(2) == 16);
  CHECK(s.n(3) == 6561);
  CHECK(s.n(4) == 4294967296ULL);
  CHECK_THROWS_AS(s.n(5), std::overflow_error);

  // log n_k = 2^k log k keeps working past the overflow.
  CHECK(s.log_n(5) == doctest::Approx(32.0 * std::log(5.0)).epsilon(1e-12));
  CHECK(s.log_n(20) == doctest::Approx(1048576.0 * std::log(20.0)).epsilon(1e-12));

  // Iterated-log ratio at k = 4: log(log 4294967296)/log 4.
  const double want = std::log(std::log(4294967296.0)) / std::log(4.0);
  CHECK(s.iterated_log_ratio(4) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("outer prefix is forced strictly increasing") {
  const BlockSchedule s = BlockSchedule::outer();
  const std::vector<std::uint64_t> prefix{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 18};
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    CHECK(s.n(i + 1) == prefix[i]);
  }
  // Strictly increasing through the representable range.
  for (std::uint64_t k = 2; k <= 200; ++k) CHECK(s.n(k) > s.n(k - 1));
  // Beyond the forced prefix the raw floor formula takes over.
  for (std::uint64_t k = 16; k <= 200; ++k) {
    const double raw = std::floor(std::exp(outer_exponent(static_cast<double>(k))));
    CHECK(s.n(k) == static_cast<std::uint64_t>(raw));
  }
}

TEST_CASE("outer endpoints overflow gracefully") {
  const BlockSchedule s = BlockSchedule::outer();
  CHECK_NOTHROW(s.n(500));  // e^{43.6} still fits in 64 bits
  CHECK_THROWS_AS(s.n(600), std::overflow_error);
  // log_n remains valid far beyond.
  CHECK(s.log_n(600) == doctest::Approx(outer_exponent(600.0)).epsilon(1e-12));
  CHECK(s.log_n(100000) == doctest::Approx(outer_exponent(100000.0)).epsilon(1e-12));
}

TEST_CASE("ratio is exact when representable, log-scale otherwise") {
  const BlockSchedule s = BlockSchedule::outer();
  CHECK(s.ratio(15) == 18.0 / 15.0);
  for (std::uint64_t k : {2ULL, 16ULL, 100ULL, 400ULL}) {
    CHECK(s.ratio(k) ==
          doctest::Approx(static_cast<double>(s.n(k)) / static_cast<double>(s.n(k - 1)))
              .epsilon(1e-15));
  }
  // Log branch: exp(f(k) - f(k-1)) once endpoints leave 64 bits.
  const double want = std::exp(outer_exponent(1000.0) - outer_exponent(999.0));
  CHECK(s.ratio(1000) == doctest::Approx(want).epsilon(1e-10));

  // The inner kind always works in log scale (its endpoints explode).
  const BlockSchedule inner = BlockSchedule::inner();
  CHECK(inner.ratio(3) == doctest::Approx(6561.0 / 16.0).epsilon(1e-12));
  const double gap = 32.0 * std::log(5.0) - 16.0 * std::log(4.0);
  CHECK(inner.ratio(5) == doctest::Approx(std::exp(gap)).epsilon(1e-10));
}

TEST_CASE("iterated-log ratio drifts toward 1 very slowly") {
  const BlockSchedule s = BlockSchedule::outer();
  const double at_1e4 = s.iterated_log_ratio(10000);
  CHECK(at_1e4 == doctest::Approx(std::log(outer_exponent(1e4)) / std::log(1e4)).epsilon(1e-12));
  // The drift is monotone upward but still far from 1 at k = 10^4: the
  // schedule's defining slowness.
  CHECK(at_1e4 > s.iterated_log_ratio(100));
  CHECK(at_1e4 < 0.7);
}

TEST_CASE("ranges tile the integers without gaps") {
  for (const BlockSchedule s : {BlockSchedule::outer(), BlockSchedule::inner()}) {
    CHECK(s.range(1).lo == 0);
    CHECK(s.range(1).hi == s.n(1));
    const std::uint64_t kmax = (s.kind == BlockKind::Outer) ? 30 : 4;
    for (std::uint64_t k = 2; k <= kmax; ++k) {
      const BlockRange r = s.range(k);
      CHECK(r.lo == s.n(k - 1));
      CHECK(r.hi == s.n(k));
      CHECK(r.lo == s.range(k - 1).hi);  // structurally disjoint
    }
  }
}

}  // TEST_SUITE
