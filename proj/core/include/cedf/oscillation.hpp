#pragma once

#include <cstdint>
#include <vector>

#include "cedf/chernoff.hpp"
#include "cedf/csv.hpp"
#include "cedf/model.hpp"

namespace cedf {

enum class OscillationBoundMode {
  kGrid,    // (10/delta)^d exp(-d delta nhf h(x))
  kGlobal,  // exp(-nhf h(x))
};

// Analytic oscillation tail bound. nhf is the normalizing mass n*h*f(z);
// chern must be the conjugate of L_{|Y|} - 1. delta must lie in
// (0, sqrt(2)-1]. When h(x) = +infinity the bound is 0; when h(x) = 0 the
// bound is vacuous (>= 1) but still returned.
double oscillation_bound(double delta, double x, double nhf, const ChernoffFunction& chern, int d,
                         OscillationBoundMode mode = OscillationBoundMode::kGrid);

// Grid resolution M = 1 + ceil(3/((sqrt(2)-1) delta)).
int oscillation_grid_m(double delta);

struct OscillationReport {
  double delta = 0.0;
  double x = 0.0;
  double nhf = 0.0;
  double empirical_tail = 0.0;
  double analytic_bound = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  bool vacuous = false;  // h_{|Y|}(x) == 0, bound carries no information
};

// Monte Carlo estimate of
//   P( sup_{|s-s'|_2 <= delta, s,s' in M-grid} |DPi(h,s) - DPi(h,s')| >= 2 d delta x )
// for the absolute-mark normalized superposition of n unit-rate compound
// Poisson processes. The supremum runs over the lemma's own M-grid
// {i/M : 0 <= i_a <= M-1}. At x = 0 the threshold is read strictly (> 0), so
// the event becomes "some visible atom exists".
OscillationReport mc_oscillation_tail(const ModelSpec& model, double h, std::uint64_t n,
                                      double delta, double x, std::uint64_t replications,
                                      std::uint64_t seed, int jobs = 1);

csv::Table oscillation_to_csv(const std::vector<OscillationReport>& reports);

// Largest dyadic bandwidth h = 2^{-j}, j = 1..40, at which the windowed
// drift ratio stays within sqrt(2)-1 of 1 on every slab of the M-grid, at
// the tilt certifying h_{|Y|}(x). Mirrors the proof-side smallness condition
// that defines the threshold below which the analytic bound is valid.
// Requires x strictly above the mean of |Y| (so the tilt is positive).
double calibrate_h_x(const ModelSpec& model, double delta, double x);

}  // namespace cedf
