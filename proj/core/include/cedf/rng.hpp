#pragma once

#include <cstdint>
#include <random>

namespace cedf {

// One SplitMix64 step (Vigna's public-domain mixer).
std::uint64_t splitmix64(std::uint64_t& state);

// Seed-stream scheme used by every Monte Carlo loop in the library:
//   task_seed = mix(mix(mix(root) ^ GOLDEN*stream) ^ GOLDEN*counter)
// where mix is SplitMix64 and GOLDEN = 0x9e3779b97f4a7c15. The map
// (root, stream, counter) -> seed is pure integer arithmetic, so identical
// on every platform; replication tasks derive their seeds from a task index,
// never from a shared mutable engine.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t counter = 0);

// mt19937_64 with hand-rolled distribution transforms. std::*_distribution
// is implementation-defined, which would tie the byte-identical-rerun
// contract to one standard library; these transforms pin the exact sampling
// algorithm instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  double uniform(double a, double b);

  bool bernoulli(double p);

  // Marsaglia polar method; one spare value cached.
  double normal();
  double normal(double mean, double sd);

  // Exact sequential-inversion samplers. Cost O(result); `poisson` splits
  // recursively for large means so the pmf never underflows.
  long poisson(double mean);
  long zero_truncated_poisson(double mean);

  // Exact Binomial(n, p) by log-space sequential inversion. n may be huge
  // (up to 2^53) provided n*p is moderate; cost O(result).
  long binomial(std::uint64_t n, double p);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cedf
