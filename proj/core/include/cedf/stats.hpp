#pragma once

#include <cstdint>

namespace cedf::stats {

// log P(N = k) for N ~ Poisson(mean), computed with lgamma; exact in the
// sense of one rounding per term.
double log_poisson_pmf(double mean, std::int64_t k);

// log P(N >= k) for N ~ Poisson(mean), computed entirely in log space.
// Right tails sum a forward geometric-dominated series from k; left-of-mean
// arguments go through the complement. Deterministic (bit-identical reruns).
double log_poisson_upper_tail(double mean, std::int64_t k);

// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace cedf::stats
