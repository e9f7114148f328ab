#include "cedf/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cedf/errors.hpp"

namespace cedf {

namespace {

// Exponent of the raw outer formula: log n_k = k e^{-sqrt(log k)} (k >= 1;
// the k = 1 exponent is 1 because log 1 = 0).
double outer_exponent(std::uint64_t k) {
  const double kd = static_cast<double>(k);
  return kd * std::exp(-std::sqrt(std::log(kd)));
}

constexpr double kLogU64Max = 44.3614195558364998;  // log(2^64)

// Forced outer chain; the forcing only binds on a short prefix (through
// k = 14), after which the raw floors already increase by at least 1.
std::uint64_t outer_exact(std::uint64_t k) {
  if (k < 1) throw config_error("BlockSchedule: k must be >= 1");
  std::uint64_t prev = 0;
  std::uint64_t value = 0;
  for (std::uint64_t j = 1; j <= k; ++j) {
    const double e = outer_exponent(j);
    if (e >= kLogU64Max) throw std::overflow_error("BlockSchedule: outer n_k exceeds 64 bits");
    const std::uint64_t raw = static_cast<std::uint64_t>(std::floor(std::exp(e)));
    value = std::max(prev + 1, raw);
    prev = value;
    if (j >= 32 && j < k) {
      // Past the forced prefix the chain equals the raw floors; jump ahead.
      const double ek = outer_exponent(k);
      if (ek >= kLogU64Max) throw std::overflow_error("BlockSchedule: outer n_k exceeds 64 bits");
      return static_cast<std::uint64_t>(std::floor(std::exp(ek)));
    }
  }
  return value;
}

std::uint64_t inner_exact(std::uint64_t k) {
  if (k < 1) throw config_error("BlockSchedule: k must be >= 1");
  // k^(2^k) by checked squaring: square k exactly 2^k times... equivalently
  // repeated checked multiplication of k, 2^k times, done as k^(2^k) =
  // ((k^2)^2...)^2 with k squarings of the base.
  std::uint64_t value = k;
  for (std::uint64_t s = 0; s < k; ++s) {
    if (value != 0 && value > 0xFFFFFFFFull)
      throw std::overflow_error("BlockSchedule: inner n_k exceeds 64 bits");
    value = value * value;
  }
  return value;
}

}  // namespace

std::uint64_t BlockSchedule::n(std::uint64_t k) const {
  return kind == BlockKind::Outer ? outer_exact(k) : inner_exact(k);
}

double BlockSchedule::log_n(std::uint64_t k) const {
  if (k < 1) throw config_error("BlockSchedule: k must be >= 1");
  if (kind == BlockKind::Inner) {
    if (k == 1) return 0.0;
    return std::exp2(static_cast<double>(k)) * std::log(static_cast<double>(k));
  }
  const double e = outer_exponent(k);
  if (e < kLogU64Max - 1.0) return std::log(static_cast<double>(outer_exact(k)));
  return e;
}

double BlockSchedule::ratio(std::uint64_t k) const {
  if (k < 2) throw config_error("BlockSchedule: ratio needs k >= 2");
  if (kind == BlockKind::Inner) {
    const double lr = log_n(k) - log_n(k - 1);
    return std::exp(lr);
  }
  const double e = outer_exponent(k);
  if (e < kLogU64Max - 1.0) {
    return static_cast<double>(outer_exact(k)) / static_cast<double>(outer_exact(k - 1));
  }
  return std::exp(outer_exponent(k) - outer_exponent(k - 1));
}

double BlockSchedule::iterated_log_ratio(std::uint64_t k) const {
  if (k < 2) throw config_error("BlockSchedule: iterated_log_ratio needs k >= 2");
  return std::log(log_n(k)) / std::log(static_cast<double>(k));
}

BlockRange BlockSchedule::range(std::uint64_t k) const {
  BlockRange r;
  r.lo = (k == 1) ? 0 : n(k - 1);
  r.hi = n(k);
  return r;
}

}  // namespace cedf
