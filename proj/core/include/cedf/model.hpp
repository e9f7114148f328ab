#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cedf/csv.hpp"
#include "cedf/grid.hpp"
#include "cedf/rng.hpp"

namespace cedf {

enum class Family { ConstantY, BoundedY, SemiParametric };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Joint law of (Y, Z), Y in R^k and Z on [0,1)^d with a product density
// f(u) = prod_a (1 + gamma_a (u_a - 1/2)) (|gamma_a| < 2 keeps it positive;
// gamma = 0 is the uniform law). Conditional law of Y given Z = z':
//   ConstantY:       Y = y0 (deterministic);
//   SemiParametric:  Y_j ~ Normal(mean_base_j + mean_slope_j * zbar', sd_j^2),
//                    independent components, zbar' = mean of the coordinates;
//   BoundedY:        Y_j ~ symmetric triangular on [y_lo_j, y_hi_j],
//                    independent components and independent of Z.
// density_at_z is the declared f(z); validation checks it against the tilt
// product so the declared constant and the sampled law never disagree.
struct ModelSpec {
  Family family = Family::ConstantY;
  int k = 1;
  int d = 1;
  std::vector<double> z;      // size d, interior of [0,1)^d
  double density_at_z = 1.0;  // declared f(z) > 0
  std::vector<double> gamma;  // size d, per-axis tilt, |gamma_a| <= 1.9

  std::vector<double> y0;  // ConstantY: size k

  std::vector<double> mean_base;   // SemiParametric: size k
  std::vector<double> mean_slope;  // SemiParametric: size k
  std::vector<double> sd;          // SemiParametric: size k, > 0

  std::vector<double> y_lo;  // BoundedY: size k
  std::vector<double> y_hi;  // BoundedY: size k, y_hi_j > y_lo_j

  // Factories fill density_at_z from the tilt product and validate.
  static ModelSpec constant(int k, int d, std::vector<double> z, std::vector<double> y0);
  static ModelSpec gaussian(int k, int d, std::vector<double> z, std::vector<double> mean_base,
                            std::vector<double> mean_slope, std::vector<double> sd,
                            std::vector<double> gamma = {});
  static ModelSpec bounded(int k, int d, std::vector<double> z, std::vector<double> y_lo,
                           std::vector<double> y_hi, std::vector<double> gamma = {});

  // Throws config_error on any invariant violation (density_at_z vs tilt
  // product, parameter sizes, positivity, z interior).
  void validate() const;

  // Marginal density of Z at a point (0 outside [0,1)^d).
  double density(const std::vector<double>& zpt) const;
  // CDF of coordinate a at u (clamped to [0,1]).
  double axis_cdf(int a, double u) const;
  // P(Z in prod_a [lo_a, hi_a)), closed form via the axis CDFs.
  double box_prob(const std::vector<double>& lo, const std::vector<double>& hi) const;
  // P(Z in z + h^{1/d} [0,1)^d).
  double window_prob(double h) const;
  // Per-axis window edge length h^{1/d}.
  double window_edge(double h) const;

  // Sampling primitives (all deterministic given the Rng state).
  std::vector<double> sample_z(Rng& rng) const;
  // Z conditioned on the axis-aligned box prod_a [lo_a, hi_a) (exact inverse
  // CDF per axis; the box must have positive probability).
  std::vector<double> sample_z_in_box(Rng& rng, const std::vector<double>& lo,
                                      const std::vector<double>& hi) const;
  // Z conditioned outside the box (rejection from the marginal law).
  std::vector<double> sample_z_outside_box(Rng& rng, const std::vector<double>& lo,
                                           const std::vector<double>& hi) const;
  std::vector<double> sample_y_given_z(Rng& rng, const std::vector<double>& zpt) const;

  // Declared conditional mean E[Y | Z = zpt] (ground truth for regression).
  std::vector<double> conditional_mean(const std::vector<double>& zpt) const;
};

enum class BandwidthMode { Nonstandard, Consistent, Custom };

// Bandwidth schedules: Nonstandard is h_n = c log log(max(n,3)) / n (so
// n h_n / log log n = c exactly for n >= 3), Consistent is
// h_n = (log(max(n,3)))^2 / n, Custom reads an explicit table. Values are
// clipped into (0,1).
struct BandwidthSchedule {
  BandwidthMode mode = BandwidthMode::Nonstandard;
  double c = 1.0;                    // Nonstandard constant, > 0
  std::vector<double> table;         // Custom: h_1, h_2, ...

  static BandwidthSchedule nonstandard(double c);
  static BandwidthSchedule consistent();
  static BandwidthSchedule custom(std::vector<double> table);
};

double bandwidth(const BandwidthSchedule& schedule, std::uint64_t n);

// n i.i.d. draws from the model, reproducible from (model, n, seed).
struct SampleBatch {
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  int k = 1;
  int d = 1;
  std::vector<double> ys;  // n * k, row-major
  std::vector<double> zs;  // n * d, row-major

  const double* y(std::uint64_t i) const { return ys.data() + i * static_cast<std::uint64_t>(k); }
  const double* zrow(std::uint64_t i) const {
    return zs.data() + i * static_cast<std::uint64_t>(d);
  }
};

SampleBatch sample_batch(const ModelSpec& model, std::uint64_t n, std::uint64_t seed);

// CSV export with columns seed,n,index,y_1..y_k,z_1..z_d.
csv::Table batch_to_csv(const SampleBatch& batch);

// The raw localized increment process on the dyadic grid S_p:
//   s  |->  (1 / (n h f(z))) sum_i 1_{[0,s)}((Z_i - z)/h^{1/d}) Y_i.
// The divisor n is batch.n. Cumulative view is coordinatewise monotone when
// all Y_i >= 0.
GridFunction increment_process(const SampleBatch& batch, const ModelSpec& model, double h, int p);

// Finite-h drift report for the local conditions: for each h, each probe set
// C (unions of at most d hypercubes, shipped: one cube, two disjoint cubes,
// two nested cubes) and each probe t, estimates
//   (1/h) E[ 1{Z in z + h^{1/d} C} e^{<t, Y>} ]
// by Monte Carlo with mc_n draws and reports drift from the target
// lambda(C) f(z) L_Y(t). t = 0 is always included (the density condition).
struct LocalConditionsRow {
  double h = 0.0;
  std::string probe;          // probe-set name
  std::vector<double> t;      // probe argument (empty = t = 0 density row)
  double estimate = 0.0;      // Monte Carlo estimate of the h-scaled moment
  double target = 0.0;        // lambda(C) f(z) L_Y(t)
  double std_error = 0.0;     // Monte Carlo standard error
};

struct LocalConditionsReport {
  std::vector<LocalConditionsRow> rows;
  // Drift |estimate - target| decreases from the first to the last h for
  // every (probe, t), within 3 combined standard errors.
  bool passes = false;
};

LocalConditionsReport verify_local_conditions(const ModelSpec& model,
                                              const std::vector<double>& h_grid,
                                              const std::vector<std::vector<double>>& t_probes,
                                              std::uint64_t mc_n, std::uint64_t seed);

}  // namespace cedf
