#include "cedf/rate.hpp"

#include <cmath>
#include <limits>

#include "cedf/errors.hpp"
#include "cedf/quad.hpp"

namespace cedf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const double* v, int k) {
  double s = 0.0;
  for (int j = 0; j < k; ++j) s += v[j] * v[j];
  return std::sqrt(s);
}

}  // namespace

double rate_p(const GridFunction& g, const ChernoffFunction& chern) {
  if (g.k() != chern.dim()) throw config_error("rate_p: dimension mismatch");
  const double lambda = g.grid().cell_measure();
  const double inv_lambda = 1.0 / lambda;  // exact: lambda is a power of two
  const std::uint64_t cells = g.grid().cell_count();
  std::vector<double> u(static_cast<std::size_t>(g.k()));
  double total = 0.0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    const double* inc = g.cell(c);
    for (int j = 0; j < g.k(); ++j) u[static_cast<std::size_t>(j)] = inc[j] * inv_lambda;
    const double h = chern.value(u);
    if (std::isinf(h)) return kInf;
    total += lambda * h;
  }
  return total;
}

RateLimitReport rate_limit(const std::function<std::vector<double>(double)>& slope_field, int k,
                           const ChernoffFunction& chern, int p_max) {
  if (p_max < 2) throw config_error("rate_limit: p_max must be >= 2");
  if (k != chern.dim()) throw config_error("rate_limit: dimension mismatch");
  RateLimitReport report;

  for (int p = 1; p <= p_max; ++p) {
    const DyadicGrid grid(1, p);
    GridFunction g(grid, k);
    const double width = grid.cell_measure();
    for (std::uint64_t c = 0; c < grid.cell_count(); ++c) {
      const double a = static_cast<double>(c) * width;
      const double b = a + width;
      double* inc = g.cell(c);
      for (int j = 0; j < k; ++j) {
        inc[j] = quad::composite_simpson(
            [&](double s) { return slope_field(s)[static_cast<std::size_t>(j)]; }, a, b, 16);
      }
    }
    report.ladder.push_back(rate_p(g, chern));
  }

  // Quadrature of h(slope(s)): scan for divergence first, then integrate.
  bool diverges = false;
  for (int i = 0; i <= 256 && !diverges; ++i) {
    const double s = static_cast<double>(i) / 256.0;
    if (std::isinf(chern.value(slope_field(s)))) diverges = true;
  }
  if (diverges) {
    report.quadrature = kInf;
  } else {
    report.quadrature = quad::adaptive_simpson(
        [&](double s) { return chern.value(slope_field(s)); }, 0.0, 1.0, 1e-10);
  }

  report.monotone = true;
  for (std::size_t i = 1; i < report.ladder.size(); ++i) {
    if (report.ladder[i] < report.ladder[i - 1] - 1e-12) report.monotone = false;
  }
  report.final_gap = std::abs(report.ladder.back() - report.quadrature);
  return report;
}

RateLevelSet::RateLevelSet(ChernoffFunction c, double level) : chern(std::move(c)), a(level) {
  if (!(a >= 0.0)) throw config_error("RateLevelSet: level must be >= 0");
}

bool level_set_contains(const GridFunction& g, const RateLevelSet& set) {
  return rate_p(g, set.chern) <= set.a;
}

GridFunction zero_rate_function(const DyadicGrid& grid, const ChernoffFunction& chern) {
  GridFunction g0(grid, chern.dim());
  const double lambda = grid.cell_measure();
  for (std::uint64_t c = 0; c < grid.cell_count(); ++c) {
    double* inc = g0.cell(c);
    for (int j = 0; j < chern.dim(); ++j) {
      inc[j] = lambda * chern.mean()[static_cast<std::size_t>(j)];
    }
  }
  return g0;
}

namespace {

GridFunction blend(const GridFunction& x, const GridFunction& anchor, double theta) {
  GridFunction out = x;
  for (std::size_t i = 0; i < out.raw().size(); ++i) {
    out.raw()[i] = (1.0 - theta) * x.raw()[i] + theta * anchor.raw()[i];
  }
  return out;
}

// Smallest blend toward the rate-zero anchor that restores J <= a. theta = 1
// is always feasible (J = 0 there), so the bisection invariant holds.
GridFunction retract_to_set(const GridFunction& x, const GridFunction& anchor,
                            const RateLevelSet& set) {
  if (rate_p(x, set.chern) <= set.a) return x;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (rate_p(blend(x, anchor, mid), set.chern) <= set.a) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return blend(x, anchor, hi);
}

// Sup-node deviation together with one attaining node and the unit direction
// of the deviation there (a subgradient certificate).
struct Deviation {
  double value = 0.0;
  std::vector<std::uint64_t> node;
  std::vector<double> sigma;  // (g - x)(node) / |.|, zero vector when value = 0
};

Deviation sup_deviation(const GridFunction& g, const GridFunction& x) {
  Deviation dev;
  const auto cg = g.cumulative_nodes();
  const auto cx = x.cumulative_nodes();
  const std::uint64_t nodes = g.grid().node_count();
  const std::uint64_t kk = static_cast<std::uint64_t>(g.k());
  std::uint64_t best_node = 0;
  double best = -1.0;
  for (std::uint64_t n = 0; n < nodes; ++n) {
    double s2 = 0.0;
    for (std::uint64_t j = 0; j < kk; ++j) {
      const double v = cg[n * kk + j] - cx[n * kk + j];
      s2 += v * v;
    }
    if (s2 > best) {
      best = s2;
      best_node = n;
    }
  }
  dev.value = std::sqrt(std::max(0.0, best));
  dev.node = g.grid().node_multi(best_node);
  dev.sigma.assign(kk, 0.0);
  if (dev.value > 0.0) {
    for (std::uint64_t j = 0; j < kk; ++j) {
      dev.sigma[j] = (cg[best_node * kk + j] - cx[best_node * kk + j]) / dev.value;
    }
  }
  return dev;
}

// Projected subgradient descent of the sup-node deviation subject to
// J^(p) <= a, with Polyak steps targeting `target` and feasibility restored
// by retraction toward the anchor. Returns the best feasible iterate found.
GridFunction shrink_deviation(const GridFunction& g, GridFunction x, const GridFunction& anchor,
                              const RateLevelSet& set, double target, int max_iter) {
  GridFunction best = x;
  double best_val = sup_deviation(g, x).value;
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    const Deviation dev = sup_deviation(g, x);
    if (dev.value <= target) {
      return x;
    }
    // Cells inside the prefix box of the attaining node.
    const std::uint64_t cells = g.grid().cell_count();
    std::vector<std::uint64_t> prefix;
    for (std::uint64_t c = 0; c < cells; ++c) {
      const auto idx = g.grid().cell_multi(c);
      bool inside = true;
      for (int a2 = 0; a2 < g.grid().d; ++a2) {
        if (idx[static_cast<std::size_t>(a2)] + 1 > dev.node[static_cast<std::size_t>(a2)]) {
          inside = false;
          break;
        }
      }
      if (inside) prefix.push_back(c);
    }
    if (prefix.empty()) break;  // deviation pinned at the origin node: x(0)=0 always
    const double step = (dev.value - target) / static_cast<double>(prefix.size());
    for (std::uint64_t c : prefix) {
      double* inc = x.cell(c);
      for (int j = 0; j < x.k(); ++j) inc[j] += step * dev.sigma[static_cast<std::size_t>(j)];
    }
    x = retract_to_set(x, anchor, set);
    const double val = sup_deviation(g, x).value;
    if (val < best_val - 1e-15) {
      best_val = val;
      best = x;
      stall = 0;
    } else if (++stall >= 300) {
      break;
    }
  }
  return best;
}

}  // namespace

DistanceResult distance_to_level_set(const GridFunction& g, const RateLevelSet& set, double tol) {
  if (!(tol > 0.0)) throw config_error("distance_to_level_set: tol must be positive");
  if (g.k() != set.chern.dim()) throw config_error("distance_to_level_set: dimension mismatch");

  DistanceResult result;
  if (rate_p(g, set.chern) <= set.a) {
    result.distance = 0.0;
    result.witness = g;
    return result;
  }

  const GridFunction anchor = zero_rate_function(g.grid(), set.chern);
  GridFunction witness = retract_to_set(g, anchor, set);
  double hi = sup_deviation(g, witness).value;
  double lo = 0.0;
  result.trace.push_back(DistanceTraceRow{lo, hi, true});

  const int max_iter = 1500;
  while (hi - lo > tol && result.trace.size() < 80) {
    const double mid = 0.5 * (lo + hi);
    // Warm start from the current best witness (always feasible).
    GridFunction candidate = shrink_deviation(g, witness, anchor, set, mid, max_iter);
    const double achieved = sup_deviation(g, candidate).value;
    const bool ok = achieved <= mid + 0.1 * tol;
    if (ok) {
      witness = candidate;
      hi = std::min(mid, achieved);
    } else {
      lo = mid;
      if (achieved < sup_deviation(g, witness).value) witness = candidate;
      hi = std::min(hi, sup_deviation(g, witness).value);
    }
    result.trace.push_back(DistanceTraceRow{lo, hi, ok});
  }

  result.distance = hi;
  result.witness = witness;
  return result;
}

TvBoundReport tv_bound_check(const GridFunction& g, const RateLevelSet& set) {
  TvBoundReport report;
  report.contained = level_set_contains(g, set);
  const std::uint64_t cells = g.grid().cell_count();
  double tv = 0.0;
  for (std::uint64_t c = 0; c < cells; ++c) tv += norm2(g.cell(c), g.k());
  report.total_variation = tv;
  report.radius = certified_tv_radius(set.chern);
  report.bound = report.radius + set.a;
  report.ok = report.contained && tv <= report.bound + 1e-12;
  return report;
}

GridFunction random_slope_function(const DyadicGrid& grid, int k, double lo_slope, double hi_slope,
                                   Rng& rng) {
  GridFunction g(grid, k);
  const double lambda = grid.cell_measure();
  for (std::uint64_t c = 0; c < grid.cell_count(); ++c) {
    double* inc = g.cell(c);
    for (int j = 0; j < k; ++j) inc[j] = lambda * rng.uniform(lo_slope, hi_slope);
  }
  return g;
}

csv::Table witness_to_csv(const GridFunction& g) {
  std::vector<std::string> header = {"cell"};
  for (int j = 1; j <= g.k(); ++j) header.push_back("inc_" + std::to_string(j));
  csv::Table table(std::move(header));
  for (std::uint64_t c = 0; c < g.grid().cell_count(); ++c) {
    std::vector<std::string> row = {csv::format(c)};
    for (int j = 0; j < g.k(); ++j) row.push_back(csv::format(g.cell(c)[j]));
    table.add_row(std::move(row));
  }
  return table;
}

csv::Table distance_trace_to_csv(const std::vector<DistanceTraceRow>& trace) {
  csv::Table table({"lo", "hi", "feasible"});
  for (const auto& row : trace) {
    table.add_row({csv::format(row.lo), csv::format(row.hi),
                   std::string(row.feasible ? "1" : "0")});
  }
  return table;
}

}  // namespace cedf
