#include "cedf/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cedf {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t s = root;
  std::uint64_t a = splitmix64(s);
  s = a ^ (kGolden * stream + 0x243f6a8885a308d3ULL);
  std::uint64_t b = splitmix64(s);
  s = b ^ (kGolden * counter + 0x13198a2e03707344ULL);
  return splitmix64(s);
}

double Rng::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
  return a + (b - a) * uniform();
}

bool Rng::bernoulli(double p) {
  return uniform() < p;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::normal(double mean, double sd) {
  return mean + sd * normal();
}

long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  // Split so the sequential inversion below never underflows exp(-mean).
  if (mean > 500.0) {
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
  }
  const double u = uniform();
  double pmf = std::exp(-mean);
  double cdf = pmf;
  long k = 0;
  while (u >= cdf) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
    if (pmf <= 0.0 || k > 100000000L) break;  // numerical guard; unreachable in practice
  }
  return k;
}

long Rng::zero_truncated_poisson(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("zero_truncated_poisson: mean must be > 0");
  // pmf(m) = mean^m e^-mean / (m! (1 - e^-mean)), m >= 1.
  const double u = uniform();
  const double norm = -std::expm1(-mean);  // 1 - e^-mean
  double pmf = mean * std::exp(-mean) / norm;
  double cdf = pmf;
  long m = 1;
  while (u >= cdf) {
    ++m;
    pmf *= mean / static_cast<double>(m);
    cdf += pmf;
    if (pmf <= 0.0 || m > 100000000L) break;
  }
  return m;
}

long Rng::binomial(std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must be in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return static_cast<long>(n);
  if (static_cast<double>(n) > 9007199254740992.0)  // 2^53: n must be exact in double
    throw std::invalid_argument("binomial: n too large for exact inversion");
  const double nd = static_cast<double>(n);
  if (nd * p > 1e6) throw std::invalid_argument("binomial: n*p too large for sequential inversion");
  const double u = uniform();
  const double odds = p / (1.0 - p);
  double log_pmf0 = nd * std::log1p(-p);
  double pmf = std::exp(log_pmf0);
  double cdf = pmf;
  long k = 0;
  while (u >= cdf && static_cast<std::uint64_t>(k) < n) {
    // pmf(k+1)/pmf(k) = (n-k)/(k+1) * p/(1-p)
    pmf *= (nd - static_cast<double>(k)) / (static_cast<double>(k) + 1.0) * odds;
    ++k;
    cdf += pmf;
    if (pmf <= 0.0) break;
  }
  return k;
}

}  // namespace cedf
