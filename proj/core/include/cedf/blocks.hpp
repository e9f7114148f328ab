#pragma once

#include <cstdint>

namespace cedf {

enum class BlockKind { Outer, Inner };

// Block index range {lo+1, ..., hi} (half-open on the left so consecutive
// blocks are structurally disjoint: range(k).lo == range(k-1).hi).
struct BlockRange {
  std::uint64_t lo = 0;  // exclusive
  std::uint64_t hi = 0;  // inclusive
};

// Block-endpoint subsequences used by the clustering experiments.
//   Outer: n_k = floor(exp(k e^{-sqrt(log k)})), forced strictly increasing
//          by n_k <- max(n_{k-1}+1, n_k). The raw formula is non-monotone for
//          small k, so the forcing genuinely binds there (through k = 14).
//   Inner: n_k = k^(2^k), exact checked integer arithmetic; the value leaves
//          the 64-bit range at k = 5 and n() then throws std::overflow_error.
struct BlockSchedule {
  BlockKind kind = BlockKind::Outer;

  static BlockSchedule outer() { return {BlockKind::Outer}; }
  static BlockSchedule inner() { return {BlockKind::Inner}; }

  // Exact n_k (k >= 1). Throws std::overflow_error when not representable.
  std::uint64_t n(std::uint64_t k) const;

  // log n_k in log scale, valid far beyond the representable range. For the
  // Outer kind beyond the forced prefix this uses the raw (un-floored)
  // formula; the neglected floor is an O(1) absolute error on n_k, which is
  // O(e^{-40}) relative once n_k overflows 64 bits.
  double log_n(std::uint64_t k) const;

  // n_k / n_{k-1} for k >= 2: exact when both endpoints are representable,
  // log-scale otherwise.
  double ratio(std::uint64_t k) const;

  // Iterated-log ratio log(log n_k) / log k (k >= 2), the quantity whose
  // limit is 1 for the Outer kind.
  double iterated_log_ratio(std::uint64_t k) const;

  // {n_{k-1}+1, ..., n_k} with n_0 = 0 at k = 1.
  BlockRange range(std::uint64_t k) const;
};

}  // namespace cedf
