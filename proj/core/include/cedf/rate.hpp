#pragma once

#include <functional>
#include <vector>

#include "cedf/chernoff.hpp"
#include "cedf/csv.hpp"
#include "cedf/grid.hpp"
#include "cedf/rng.hpp"

namespace cedf {

// Depth-p rate functional J^(p)(g) = sum_j lambda(C_j) h(lambda(C_j)^{-1} g(C_j)).
// Returns +infinity when any cell value leaves the conjugate's finite domain.
// lambda(C_j) = 2^{-pd} is an exact power of two, so the rescaling
// lambda^{-1} g(C_j) is exact in floating point.
double rate_p(const GridFunction& g, const ChernoffFunction& chern);

// Refinement ladder J^(1..p_max) for a d = 1 function given by its slope
// field, against the quadrature value of the integral of h(slope(s)).
// Cell increments integrate the slope by a fixed per-cell Simpson rule.
struct RateLimitReport {
  std::vector<double> ladder;  // J^(p), p = 1..p_max
  double quadrature = 0.0;     // integral of h(slope(s)) ds (adaptive Simpson)
  bool monotone = false;       // ladder nondecreasing within 1e-12
  double final_gap = 0.0;      // |ladder.back() - quadrature|
};

RateLimitReport rate_limit(const std::function<std::vector<double>(double)>& slope_field, int k,
                           const ChernoffFunction& chern, int p_max);

// Level set {g : J^(p)(g) <= a}. Contains the mean-slope function for every
// a >= 0 and is convex because h is.
struct RateLevelSet {
  ChernoffFunction chern;
  double a = 0.0;

  RateLevelSet(ChernoffFunction c, double level);
};

// Exact at depth p for piecewise-constant-slope functions; in general a
// necessary condition for containment in the continuum level set (J^(p) <= J).
bool level_set_contains(const GridFunction& g, const RateLevelSet& set);

// The mean-slope function (cell increments lambda * mean): J = 0 exactly.
GridFunction zero_rate_function(const DyadicGrid& grid, const ChernoffFunction& chern);

struct DistanceTraceRow {
  double lo = 0.0;
  double hi = 0.0;
  bool feasible = false;
};

struct DistanceResult {
  double distance = 0.0;
  GridFunction witness;  // feasible point achieving the distance within tol
  std::vector<DistanceTraceRow> trace;
};

// min over g' with J^(p)(g') <= a of the sup-over-grid-nodes distance
// |g - g'|, by bisection on the distance with an inner projected-subgradient
// feasibility solve (feasibility is restored by radial retraction toward the
// mean-slope function, which has rate exactly 0). Contained queries return
// distance 0.0 exactly with witness g.
DistanceResult distance_to_level_set(const GridFunction& g, const RateLevelSet& set, double tol);

struct TvBoundReport {
  double total_variation = 0.0;  // sum_j |g(C_j)|_k
  double radius = 0.0;           // certified M with h(u) >= |u| beyond M
  double bound = 0.0;            // M + a
  bool contained = false;
  bool ok = false;  // contained and total_variation <= bound
};

// Total-variation bound satisfied by every member of the level set:
// sum_j |g(C_j)|_k <= M + a (split cells at |u| = M; h(u) >= |u| beyond M
// pays for the large cells, J <= a caps their total).
TvBoundReport tv_bound_check(const GridFunction& g, const RateLevelSet& set);

// Test/experiment helper: increments lambda * U[lo_slope, hi_slope] i.i.d.
// per cell and component.
GridFunction random_slope_function(const DyadicGrid& grid, int k, double lo_slope,
                                   double hi_slope, Rng& rng);

// CSV exports: witness cells (cell,inc_1..inc_k) and bisection trace
// (lo,hi,feasible).
csv::Table witness_to_csv(const GridFunction& g);
csv::Table distance_trace_to_csv(const std::vector<DistanceTraceRow>& trace);

}  // namespace cedf
