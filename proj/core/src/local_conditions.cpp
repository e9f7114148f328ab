#include <cmath>
#include <string>
#include <vector>

#include "cedf/errors.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "cedf/streams.hpp"

namespace cedf {

namespace {

struct Cube {
  double lo = 0.0;
  double hi = 1.0;  // same interval on every axis: [lo, hi)^d
};

struct Probe {
  std::string name;
  std::vector<Cube> cubes;  // union of at most d hypercubes
};

double cube_volume(const Cube& c, int d) { return std::pow(c.hi - c.lo, d); }

double union_measure(const Probe& probe, int d) {
  if (probe.cubes.size() == 1) return cube_volume(probe.cubes[0], d);
  const Cube& a = probe.cubes[0];
  const Cube& b = probe.cubes[1];
  const double inter_lo = std::max(a.lo, b.lo);
  const double inter_hi = std::min(a.hi, b.hi);
  const double inter = inter_hi > inter_lo ? std::pow(inter_hi - inter_lo, d) : 0.0;
  return cube_volume(a, d) + cube_volume(b, d) - inter;
}

bool member(const Probe& probe, const std::vector<double>& w) {
  for (const Cube& c : probe.cubes) {
    bool inside = true;
    for (double wa : w) {
      if (wa < c.lo || wa >= c.hi) {
        inside = false;
        break;
      }
    }
    if (inside) return true;
  }
  return false;
}

}  // namespace

LocalConditionsReport verify_local_conditions(const ModelSpec& model,
                                              const std::vector<double>& h_grid,
                                              const std::vector<std::vector<double>>& t_probes,
                                              std::uint64_t mc_n, std::uint64_t seed) {
  model.validate();
  if (h_grid.size() < 2) throw config_error("verify_local_conditions: need >= 2 bandwidths");
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0 && h_grid[i] < 1.0)) {
      throw config_error("verify_local_conditions: bandwidths must be in (0,1)");
    }
    if (i > 0 && !(h_grid[i] < h_grid[i - 1])) {
      throw config_error("verify_local_conditions: h_grid must decrease");
    }
  }
  if (mc_n < 100) throw config_error("verify_local_conditions: mc_n too small for error bars");
  for (const auto& t : t_probes) {
    if (static_cast<int>(t.size()) != model.k) {
      throw config_error("verify_local_conditions: probe arity mismatch");
    }
  }

  // Probe sets from the class of unions of at most d hypercubes: one cube
  // always; a disjoint pair and a nested pair once d >= 2 allows two cubes.
  std::vector<Probe> probes;
  probes.push_back(Probe{"cube", {Cube{0.0, 0.75}}});
  if (model.d >= 2) {
    probes.push_back(Probe{"disjoint-pair", {Cube{0.0, 0.4}, Cube{0.5, 0.9}}});
    probes.push_back(Probe{"nested-pair", {Cube{0.0, 0.8}, Cube{0.2, 0.6}}});
  }
  for (const Probe& probe : probes) {
    if (!(union_measure(probe, model.d) > 0.0)) {
      throw config_error("verify_local_conditions: degenerate probe set");
    }
  }

  const LaplaceTransform L = laplace_transform(model);
  // t = 0 (the density condition) first, then the caller's probes.
  std::vector<std::vector<double>> ts;
  ts.emplace_back(static_cast<std::size_t>(model.k), 0.0);
  for (const auto& t : t_probes) ts.push_back(t);

  LocalConditionsReport report;
  const std::size_t n_cells = probes.size() * ts.size();

  std::vector<double> first_drift(n_cells, 0.0), first_se(n_cells, 0.0);
  bool all_ok = true;
  for (std::size_t hi_idx = 0; hi_idx < h_grid.size(); ++hi_idx) {
    const double h = h_grid[hi_idx];
    const double edge = model.window_edge(h);
    std::vector<double> lo = model.z, hi_box = model.z;
    for (int a = 0; a < model.d; ++a) hi_box[static_cast<std::size_t>(a)] += edge;
    const double p_win = model.window_prob(h);

    Rng rng(derive_seed(seed, streams::kLocalConditions, hi_idx));
    const std::uint64_t hits = rng.binomial(mc_n, p_win);

    std::vector<double> sum(n_cells, 0.0), sumsq(n_cells, 0.0);
    std::vector<double> w(static_cast<std::size_t>(model.d));
    for (std::uint64_t i = 0; i < hits; ++i) {
      const auto zpt = model.sample_z_in_box(rng, lo, hi_box);
      for (int a = 0; a < model.d; ++a) {
        w[static_cast<std::size_t>(a)] =
            (zpt[static_cast<std::size_t>(a)] - model.z[static_cast<std::size_t>(a)]) / edge;
      }
      const auto y = model.sample_y_given_z(rng, zpt);
      for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        if (!member(probes[pi], w)) continue;
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
          double tysum = 0.0;
          for (int j = 0; j < model.k; ++j) {
            tysum += ts[ti][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
          }
          const double val = std::exp(tysum) / h;
          const std::size_t cell = pi * ts.size() + ti;
          sum[cell] += val;
          sumsq[cell] += val * val;
        }
      }
    }

    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      const double lambda = union_measure(probes[pi], model.d);
      for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        const std::size_t cell = pi * ts.size() + ti;
        const double est = sum[cell] / static_cast<double>(mc_n);
        const double mean_sq = sumsq[cell] / static_cast<double>(mc_n);
        const double var = std::max(0.0, mean_sq - est * est) / static_cast<double>(mc_n);
        LocalConditionsRow row;
        row.h = h;
        row.probe = probes[pi].name;
        row.t = ti == 0 ? std::vector<double>{} : ts[ti];
        row.estimate = est;
        row.target = lambda * model.density_at_z * L.eval(ts[ti]);
        row.std_error = std::sqrt(var);
        report.rows.push_back(row);

        if (hi_idx == 0) {
          first_drift[cell] = std::abs(est - row.target);
          first_se[cell] = row.std_error;
        } else if (hi_idx + 1 == h_grid.size()) {
          const double last_drift = std::abs(est - row.target);
          const double slack = 3.0 * (first_se[cell] + row.std_error);
          if (!(last_drift <= first_drift[cell] + slack)) all_ok = false;
        }
      }
    }
  }
  report.passes = all_ok;
  return report;
}

}  // namespace cedf
