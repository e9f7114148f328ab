#include "cedf/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cedf::stats {

namespace {

// Streaming log-sum-exp accumulator.
struct LogSum {
  double log_value = -std::numeric_limits<double>::infinity();

  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > log_value) {
      log_value = std::isfinite(log_value)
                      ? log_term + std::log1p(std::exp(log_value - log_term))
                      : log_term;
    } else {
      log_value += std::log1p(std::exp(log_term - log_value));
    }
  }
};

}  // namespace

double log_poisson_pmf(double mean, std::int64_t k) {
  if (!(mean >= 0.0)) throw std::invalid_argument("log_poisson_pmf: mean must be >= 0");
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double kd = static_cast<double>(k);
  return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

double log_poisson_upper_tail(double mean, std::int64_t k) {
  if (!(mean >= 0.0)) throw std::invalid_argument("log_poisson_upper_tail: mean must be >= 0");
  if (k <= 0) return 0.0;
  if (mean == 0.0) return -std::numeric_limits<double>::infinity();

  const double sd = std::sqrt(mean);
  if (static_cast<double>(k) < mean - 10.0 * sd) {
    // Left tail is tiny; sum P(N <= k-1) backward and use log1p on the
    // complement, which keeps full precision for a result near log(1) = 0.
    LogSum left;
    double log_term = log_poisson_pmf(mean, k - 1);
    left.add(log_term);
    for (std::int64_t j = k - 1; j > 0; --j) {
      // pmf(j-1) = pmf(j) * j / mean
      log_term += std::log(static_cast<double>(j)) - std::log(mean);
      left.add(log_term);
      if (log_term < left.log_value - 60.0) break;
    }
    return std::log1p(-std::exp(left.log_value));
  }

  // Forward sum from k. Terms may rise until j ~ mean, then decay
  // geometrically; cut off once safely past the mode and negligible.
  LogSum sum;
  double log_term = log_poisson_pmf(mean, k);
  sum.add(log_term);
  const std::int64_t hard_cap = k + static_cast<std::int64_t>(mean + 50.0 * sd) + 64;
  for (std::int64_t j = k + 1; j <= hard_cap; ++j) {
    // pmf(j) = pmf(j-1) * mean / j
    log_term += std::log(mean) - std::log(static_cast<double>(j));
    sum.add(log_term);
    if (static_cast<double>(j) > mean && log_term < sum.log_value - 60.0) break;
  }
  return sum.log_value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace cedf::stats
