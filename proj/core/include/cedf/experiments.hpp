#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cedf/blocks.hpp"
#include "cedf/csv.hpp"
#include "cedf/model.hpp"
#include "cedf/rate.hpp"

namespace cedf {

// One experiment's machine-readable output: a CSV table (schema documented
// per experiment, always carrying a seed column) plus the canonical config
// echo. File naming: <experiment>-<confighash>-<seed>.{csv,json}; wall-clock
// metadata is quarantined into a .meta side file so CSV and JSON bodies are
// byte-identical across reruns.
struct ExperimentResult {
  std::string experiment;
  std::string config_hash;  // 16 hex digits
  std::uint64_t seed = 0;
  csv::Table table;
  std::string config_echo;  // canonical config JSON text (may be empty)

  std::string base_name() const;
  // Writes the .csv/.json/.meta files into dir (created if missing) and
  // returns the CSV path.
  std::string write(const std::string& dir) const;
};

// ---------------------------------------------------------------------------
// Finite-n single-cell LDP check.
// ---------------------------------------------------------------------------

enum class LdpMode { ExactPoisson, MonteCarlo };

struct LdpCellRow {
  double nhf = 0.0;     // normalizing mass on the ladder
  double value = 0.0;   // -(1/nhf) log P(increment over the cell >= x)
  double target = 0.0;  // lambda(C) h(x / lambda(C))
  double mc_error = 0.0;
  bool unresolvable = false;  // MC tail below 10/replications
};

// For each nhf on the ladder computes -(1/nhf) log P(DPi(C) >= x) where the
// cell value is (1/nhf) sum of marks of a Poisson(nhf*lambda(C)) number of
// atoms. ExactPoisson requires unit marks (ConstantY, k = 1, y0 = 1) and
// computes the tail in log space; MonteCarlo draws marks at Z = z (scalar
// marks required) and flags tails below 10/replications as unresolvable.
std::vector<LdpCellRow> ldp_cell_check(const ModelSpec& model, double cell_measure, double x,
                                       const std::vector<double>& nhf_ladder, LdpMode mode,
                                       std::uint64_t replications, std::uint64_t seed,
                                       int jobs = 1);

csv::Table ldp_to_csv(const std::vector<LdpCellRow>& rows, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Block-subsequence clustering runs.
// ---------------------------------------------------------------------------

struct ClusteringParams {
  std::uint64_t outer_k_min = 2;
  std::uint64_t outer_k_max = 60;
  std::uint64_t inner_k_min = 2;
  std::uint64_t inner_k_max = 4;
  int depth = 4;                       // grid depth p of the traces
  double distance_tol = 1e-3;          // outer distance solve tolerance
  std::uint64_t n_limit = 2'000'000;   // trajectory budget guard
};

struct ClusteringOuterRow {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  double h = 0.0;
  double distance = 0.0;  // d(increment at n_k, level set)
};

struct ClusteringInnerRow {
  std::uint64_t k = 0;
  std::uint64_t n = 0;  // inner endpoint
  double h = 0.0;
  std::size_t target = 0;
  double distance = 0.0;     // sup-node distance of the block increment to g
  double running_min = 0.0;  // min over inner k so far for this target
};

struct ClusteringResult {
  std::vector<ClusteringOuterRow> outer;
  std::vector<ClusteringInnerRow> inner;
};

// Outer trace: one trajectory of the model, increments at the outer block
// endpoints n_k, distance to the level set (the finite-n entry statistic).
// Inner trace: for each target, the block-restricted increment over the
// disjoint inner index ranges (n_{k-1}, n_k], normalized by the full prefix
// mass n_k h f(z), and its running minimum distance to the target (the
// finite-n visit statistic). Targets must belong to the level set.
ClusteringResult clustering_run(const ModelSpec& model, const BandwidthSchedule& schedule,
                                const BlockSchedule& outer, const BlockSchedule& inner,
                                const RateLevelSet& set, const std::vector<GridFunction>& targets,
                                const ClusteringParams& params, std::uint64_t seed);

csv::Table clustering_outer_to_csv(const std::vector<ClusteringOuterRow>& rows,
                                   std::uint64_t seed);
csv::Table clustering_inner_to_csv(const std::vector<ClusteringInnerRow>& rows,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Nadaraya-Watson estimates and the inconsistency contrast.
// ---------------------------------------------------------------------------

enum class Kernel { Box, Triangle };

Kernel kernel_from_name(const std::string& name);
std::string kernel_name(Kernel k);

struct NwEstimate {
  std::vector<double> value;  // size k, meaningful only when defined
  bool defined = false;       // kernel mass in the window was nonzero
};

// r_n(z) = sum_i K((Z_i - z)/h^{1/d}) Y_i / sum_j K((Z_j - z)/h^{1/d}).
// Kernels live on [0,1)^d and are unnormalized (the ratio cancels any
// constant): Box is the window indicator, Triangle the product tent.
NwEstimate nw_estimate(const SampleBatch& batch, const ModelSpec& model, Kernel kernel, double h);

struct NwContrastSeedRow {
  std::uint64_t seed_index = 0;
  double osc_hv = 0.0;          // max |r_n(z) - r(z)|_2 over the upper half
  double osc_consistent = 0.0;  // of the checkpoint ladder, defined n only
  std::uint64_t undefined_hv = 0;
  std::uint64_t undefined_consistent = 0;
};

struct NwContrastResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<NwContrastSeedRow> rows;
  double median_osc_hv = 0.0;
  double median_osc_consistent = 0.0;
  double ratio = 0.0;  // median_osc_hv / median_osc_consistent
};

// Runs r_n along log-spaced checkpoints in [n_lo, n_hi] under the (HV)
// bandwidth c log log(n)/n and under the consistent bandwidth (log n)^2/n on
// identical data streams (one stream per seed, shared across both modes).
// The oscillation statistic is taken over the upper half of the ladder;
// undefined estimates (empty kernel window) are excluded and counted.
NwContrastResult nw_inconsistency_contrast(const ModelSpec& model, double c, std::uint64_t n_lo,
                                           std::uint64_t n_hi, int n_checkpoints, Kernel kernel,
                                           int n_seeds, std::uint64_t seed, int jobs = 1);

csv::Table nw_contrast_to_csv(const NwContrastResult& result, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Outer-block discrepancy bound check.
// ---------------------------------------------------------------------------

struct BlockDiscrepancyRow {
  std::uint64_t k = 0;
  std::uint64_t n = 0;    // probe inside the block, n < n_k
  std::uint64_t n_k = 0;  // block endpoint
  double eps = 0.0;
  double frequency = 0.0;  // MC frequency of sup-discrepancy > eps
  double bound = 0.0;      // exp(-(n_k - n) h f(z) h_{|Y|}(eps n_k/(n_k - n)))
  std::uint64_t replications = 0;
};

// For probes n inside the outer block N_k, Monte Carlo frequency of the
// event that the absolute mass of the tail sum (indices n+1..n_k, windowed)
// exceeds eps * n_k h f(z) — an upper proxy for the sup-norm discrepancy
// between the prefix process and the block-endpoint process — against the
// analytic bound above.
std::vector<BlockDiscrepancyRow> block_discrepancy_check(const ModelSpec& model,
                                                         const BandwidthSchedule& schedule,
                                                         std::uint64_t k, double eps, int n_probes,
                                                         std::uint64_t replications,
                                                         std::uint64_t seed, int jobs = 1);

csv::Table block_discrepancy_to_csv(const std::vector<BlockDiscrepancyRow>& rows,
                                    std::uint64_t seed);

}  // namespace cedf
