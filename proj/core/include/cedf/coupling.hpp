#pragma once

#include <cstdint>
#include <vector>

#include "cedf/model.hpp"
#include "cedf/rng.hpp"

namespace cedf {

// One index of the empirical/Poisson coupling. The window is
// V_i = z + h_i^{1/d}[0,1)^d with p_i = P(Z in V_i). The construction draws
//   b   ~ Bernoulli(p_i),
//   v   ~ the auxiliary law  P(v=0) = 1 - (1 - e^{-p})/p,
//                            P(v=m) = p^{m-1} e^{-p}/m!   (m >= 1),
// and sets eta_star = v * b, which is exactly Poisson(p_i). The derived
// empirical pair is the first inside pair when b = 1 and a dedicated outside
// pair when b = 0; the derived Poisson realization keeps the first eta_star
// inside pairs plus a Poisson(1 - p_i) background conditioned outside the
// window. The two derived objects coincide inside the window (at every
// sub-bandwidth) exactly when eta_star == b.
struct CouplingRealization {
  std::uint64_t index = 0;  // position in the bandwidth schedule (1-based n)
  double h = 0.0;
  double p_window = 0.0;
  bool b = false;
  std::uint64_t v = 0;
  std::uint64_t eta_star = 0;
  std::uint64_t n_background = 0;
  std::vector<double> z_emp;  // d, derived empirical location
  std::vector<double> y_emp;  // k, derived empirical mark
  // Poisson atoms, inside atoms first (eta_star of them), background after.
  std::vector<double> locs;  // (eta_star + n_background) * d
  std::vector<double> ys;    // (eta_star + n_background) * k
  bool match = false;        // eta_star == b
};

// Exact mismatch probability P(eta_star != b) = p (1 - e^{-p}); always <= p^2.
double coupling_mismatch_prob(double p);

// Sampler for the auxiliary law above. Requires p in (0, 1].
std::uint64_t sample_coupling_v(Rng& rng, double p);

// Builds the coupled sequence for indices 1..n_max, bandwidths from the
// schedule. Each index uses an independently derived seed, so any prefix of
// the sequence is reproducible independently of n_max.
std::vector<CouplingRealization> build_coupling(const ModelSpec& model,
                                                const BandwidthSchedule& schedule,
                                                std::uint64_t n_max, std::uint64_t seed);

}  // namespace cedf
