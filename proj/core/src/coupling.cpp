#include "cedf/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "cedf/errors.hpp"
#include "cedf/streams.hpp"

namespace cedf {

double coupling_mismatch_prob(double p) {
  if (!(p > 0.0 && p < 1.0)) throw config_error("coupling_mismatch_prob: p must lie in (0,1)");
  return p * (-std::expm1(-p));
}

std::uint64_t sample_coupling_v(Rng& rng, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw config_error("sample_coupling_v: p must lie in (0,1]");
  // P(v=0) = 1 - (1-e^{-p})/p, computed via expm1 so small p keeps full
  // relative accuracy (the value is ~ p/2 there).
  const double q0 = 1.0 + std::expm1(-p) / p;
  double u = rng.uniform();
  if (u < q0) return 0;
  u -= q0;
  // P(v=m) = p^{m-1} e^{-p} / m!, recurrence q_{m+1} = q_m * p / (m+1).
  double q = std::exp(-p);  // m = 1 term
  std::uint64_t m = 1;
  while (u >= q && m < 4096) {
    u -= q;
    ++m;
    q *= p / static_cast<double>(m);
  }
  return m;
}

std::vector<CouplingRealization> build_coupling(const ModelSpec& model,
                                                const BandwidthSchedule& schedule,
                                                std::uint64_t n_max, std::uint64_t seed) {
  model.validate();
  if (n_max < 1) throw config_error("build_coupling: n_max must be >= 1");
  std::vector<CouplingRealization> out;
  out.reserve(n_max);
  const std::size_t d = static_cast<std::size_t>(model.d);
  const std::size_t k = static_cast<std::size_t>(model.k);
  std::vector<double> lo(d), hi(d);
  for (std::uint64_t i = 1; i <= n_max; ++i) {
    const double h = bandwidth(schedule, i);
    const double p = model.window_prob(h);
    if (!(p > 0.0 && p < 1.0))
      throw config_error("build_coupling: window probability must lie in (0,1)");
    const double edge = model.window_edge(h);
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = model.z[a];
      hi[a] = lo[a] + edge;
    }
    Rng rng(derive_seed(seed, streams::kCoupling, i));
    CouplingRealization r;
    r.index = i;
    r.h = h;
    r.p_window = p;
    r.b = rng.bernoulli(p);
    r.v = sample_coupling_v(rng, p);
    r.eta_star = r.b ? r.v : 0;
    // Inside pairs: U needs eta_star of them; the derived empirical pair is
    // inside pair #1 whenever b = 1, even if eta_star = 0.
    const std::uint64_t n_inside = std::max<std::uint64_t>(r.eta_star, r.b ? 1 : 0);
    r.n_background = rng.poisson(1.0 - p);
    const std::uint64_t n_atoms = r.eta_star + r.n_background;
    r.locs.resize(n_atoms * d);
    r.ys.resize(n_atoms * k);
    for (std::uint64_t j = 0; j < n_inside; ++j) {
      const std::vector<double> zpt = model.sample_z_in_box(rng, lo, hi);
      const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
      if (j == 0 && r.b) {
        r.z_emp = zpt;
        r.y_emp = ypt;
      }
      if (j < r.eta_star) {
        for (std::size_t a = 0; a < d; ++a) r.locs[j * d + a] = zpt[a];
        for (std::size_t c = 0; c < k; ++c) r.ys[j * k + c] = ypt[c];
      }
    }
    if (!r.b) {
      r.z_emp = model.sample_z_outside_box(rng, lo, hi);
      r.y_emp = model.sample_y_given_z(rng, r.z_emp);
    }
    for (std::uint64_t j = 0; j < r.n_background; ++j) {
      const std::uint64_t slot = r.eta_star + j;
      const std::vector<double> zpt = model.sample_z_outside_box(rng, lo, hi);
      const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
      for (std::size_t a = 0; a < d; ++a) r.locs[slot * d + a] = zpt[a];
      for (std::size_t c = 0; c < k; ++c) r.ys[slot * k + c] = ypt[c];
    }
    r.match = (r.eta_star == (r.b ? 1u : 0u));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cedf
