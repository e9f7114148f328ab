#pragma once

// Shared oracle helpers for the unit suite. Everything here is implemented
// independently of the library under test: closed forms, brute-force search,
// boost::math reference distributions, and generic statistical tests with
// fixed 1% critical values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

// x log x - x + 1 extended by h(0) = 1 and +infinity left of 0: the
// closed-form conjugate of e^t - 1 (unit point marks).
inline double h1(double x) {
  if (x < 0.0) return std::numeric_limits<double>::infinity();
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

// One-sample Kolmogorov-Smirnov statistic. The 1% critical value for the
// sample sizes used in this suite is 1.63 / sqrt(n).
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

inline double ks_critical(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

// Pearson chi-squared statistic for observed counts against expected counts
// (same length, expected > 0 in every used bin).
inline double chi2_statistic(const std::vector<double>& observed,
                             const std::vector<double>& expected) {
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    const double dlt = observed[i] - expected[i];
    s += dlt * dlt / expected[i];
  }
  return s;
}

inline double chi2_critical_1pct(int dof) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), 0.99);
}

// Standard normal CDF via erfc (no library code involved).
inline double phi(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// MGF of the symmetric triangular law on [lo, hi]: the sum of two
// independent U(-c/2, c/2) shifted by the midpoint, c = (hi - lo)/2.
inline double triangular_mgf(double t, double lo, double hi) {
  const double m = 0.5 * (lo + hi);
  const double c = 0.5 * (hi - lo);
  if (std::fabs(t) < 1e-12) return std::exp(m * t);
  const double x = 0.5 * c * t;
  const double s = std::sinh(x) / x;
  return std::exp(m * t) * s * s;
}

// CDF of the same triangular law.
inline double triangular_cdf(double x, double lo, double hi) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double w = hi - lo;
  const double m = 0.5 * (lo + hi);
  if (x <= m) {
    const double u = x - lo;
    return 2.0 * u * u / (w * w);
  }
  const double u = hi - x;
  return 1.0 - 2.0 * u * u / (w * w);
}

// MGF of |Y| for Y ~ Normal(mu, sd^2) (folded normal), closed form.
inline double folded_normal_mgf(double t, double mu, double sd) {
  const double g = std::exp(0.5 * sd * sd * t * t);
  return g * (std::exp(t * mu) * phi(mu / sd + sd * t) +
              std::exp(-t * mu) * phi(sd * t - mu / sd));
}

// Composite Simpson on [a, b] with n (even) intervals; independent of the
// library's adaptive quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
