#pragma once

#include <optional>
#include <vector>

#include "cedf/laplace.hpp"

namespace cedf {

// Result of one conjugate evaluation h(u) = sup_t <t,u> - (L(t) - 1).
// diverged = true means the ascent certified unbounded growth (objective
// exceeded the configured ceiling), i.e. h(u) = +infinity; argmax is then
// empty. Otherwise value >= 0 always holds because the ascent starts at
// t = 0 where the objective is exactly 0.
struct ChernoffResult {
  double value = 0.0;
  std::vector<double> argmax;
  int iterations = 0;
  bool diverged = false;
};

struct ChernoffOptions {
  // 0 = dimension default: 1e-8 for k = 1, 1e-6 for k > 1.
  double tol = 0.0;
  // Objective value beyond which the supremum is declared unattained.
  double ceiling = 1e12;
  int max_iter = 400;
};

// Legendre-Fenchel conjugate of L - 1 for a smooth log-convex L, evaluated
// by damped Newton ascent (Levenberg-damped steps, Armijo backtracking).
class ChernoffFunction {
 public:
  explicit ChernoffFunction(LaplaceTransform source, ChernoffOptions opt = {});

  int dim() const { return source_.dim; }
  const std::vector<double>& mean() const { return source_.mean; }
  const LaplaceTransform& source() const { return source_; }
  const ChernoffOptions& options() const { return opt_; }
  double default_tol() const;

  ChernoffResult eval(const std::vector<double>& u, double tol) const;
  ChernoffResult eval(const std::vector<double>& u) const { return eval(u, default_tol()); }

  // Value-only conveniences (+infinity when diverged).
  double value(const std::vector<double>& u) const;
  double value1(double x) const;  // k = 1 only

 private:
  LaplaceTransform source_;
  ChernoffOptions opt_;
};

ChernoffResult chernoff_eval(const ChernoffFunction& chern, const std::vector<double>& u,
                             double tol);

// Boundary points of the closed sublevel set {x : h(x) <= level} around the
// mean, for one-dimensional conjugates. A side is nullopt when h stays below
// level all the way to the search cap (no finite root on that side).
struct LevelRoots {
  std::optional<double> lower;
  std::optional<double> upper;
};

LevelRoots chernoff_level_roots(const ChernoffFunction& chern, double level);

struct SuperlinearityRow {
  std::vector<double> direction;
  double radius = 0.0;
  double ratio = 0.0;   // h(R e) / R; +infinity when h diverges there
  bool unbounded = false;
};

struct SuperlinearityReport {
  std::vector<SuperlinearityRow> rows;
  double threshold = 1.0;
  bool passes = false;
};

// Tabulates h(R e)/R along each direction over the radius ladder; passes
// when every direction is nondecreasing along the ladder and ends above the
// threshold (an immediately-unbounded direction passes outright).
SuperlinearityReport superlinearity_certificate(const ChernoffFunction& chern,
                                                const std::vector<double>& radii,
                                                const std::vector<std::vector<double>>& directions,
                                                double threshold = 1.0);

// Smallest certified radius M with h(u) >= |u| for all |u| >= M.
// k = 1: doubling ladder with the chord criterion h(+-R) >= R + |mean|,
// which is sufficient by convexity of h and h(mean) = 0. k > 1: the same
// chord criterion swept over a finite direction set (documented heuristic).
double certified_tv_radius(const ChernoffFunction& chern);

}  // namespace cedf
