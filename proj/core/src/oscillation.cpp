#include "cedf/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cedf/errors.hpp"
#include "cedf/laplace.hpp"
#include "cedf/parallel.hpp"
#include "cedf/quad.hpp"
#include "cedf/streams.hpp"

namespace cedf {

namespace {

constexpr double kDeltaCap = 0.41421356237309515;  // sqrt(2) - 1

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= kDeltaCap))
    throw config_error("oscillation: delta must lie in (0, sqrt(2)-1]");
}

}  // namespace

int oscillation_grid_m(double delta) {
  check_delta(delta);
  return 1 + static_cast<int>(std::ceil(3.0 / (kDeltaCap * delta)));
}

double oscillation_bound(double delta, double x, double nhf, const ChernoffFunction& chern, int d,
                         OscillationBoundMode mode) {
  check_delta(delta);
  if (!(nhf > 0.0)) throw config_error("oscillation_bound: nhf must be positive");
  if (!(x >= 0.0)) throw config_error("oscillation_bound: x must be nonnegative");
  if (d < 1) throw config_error("oscillation_bound: d must be >= 1");
  const double hx = chern.value1(x);
  if (std::isinf(hx)) return 0.0;
  if (mode == OscillationBoundMode::kGlobal) return std::exp(-nhf * hx);
  return std::pow(10.0 / delta, d) * std::exp(-static_cast<double>(d) * delta * nhf * hx);
}

namespace {

// All lexicographically positive offsets o != 0 with |o|_2 <= delta*M, as
// flat linear-index displacements plus per-axis bounds for range checking.
struct OffsetTable {
  std::vector<std::vector<int>> offsets;
};

OffsetTable build_offsets(int d, int m, double delta) {
  const double cap = delta * static_cast<double>(m);
  const int r = static_cast<int>(std::floor(cap));
  OffsetTable table;
  std::vector<int> o(static_cast<std::size_t>(d), -r);
  while (true) {
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += static_cast<double>(o[a]) * static_cast<double>(o[a]);
    bool positive = false;  // lexicographic sign, highest axis first
    for (int a = d - 1; a >= 0; --a) {
      if (o[a] != 0) {
        positive = o[a] > 0;
        break;
      }
    }
    if (positive && norm2 <= cap * cap + 1e-9) table.offsets.push_back(o);
    int axis = 0;
    while (axis < d) {
      if (++o[axis] <= r) break;
      o[axis] = -r;
      ++axis;
    }
    if (axis == d) break;
  }
  return table;
}

}  // namespace

OscillationReport mc_oscillation_tail(const ModelSpec& model, double h, std::uint64_t n,
                                      double delta, double x, std::uint64_t replications,
                                      std::uint64_t seed, int jobs) {
  model.validate();
  check_delta(delta);
  if (!(h > 0.0 && h < 1.0)) throw config_error("mc_oscillation_tail: h must lie in (0,1)");
  if (n < 1) throw config_error("mc_oscillation_tail: n must be >= 1");
  if (replications == 0) throw config_error("mc_oscillation_tail: replications must be >= 1");
  if (!(x >= 0.0)) throw config_error("mc_oscillation_tail: x must be nonnegative");
  if (jobs < 1) throw config_error("mc_oscillation_tail: jobs must be >= 1");

  const int d = model.d;
  const int m = oscillation_grid_m(delta);
  double cells_d = 1.0;
  for (int a = 0; a < d; ++a) cells_d *= static_cast<double>(m);
  if (cells_d > static_cast<double>(std::uint64_t{1} << 24))
    throw config_error("mc_oscillation_tail: M^d grid too large");
  const std::uint64_t n_cells = static_cast<std::uint64_t>(cells_d);

  ChernoffFunction chern(absolute_laplace_transform(model));
  const double nhf = static_cast<double>(n) * h * model.density_at_z;
  const double threshold = 2.0 * static_cast<double>(d) * delta * x;
  const double p_win = model.window_prob(h);
  const double mean_count = static_cast<double>(n) * p_win;
  const double edge = model.window_edge(h);
  const double scale = 1.0 / nhf;

  std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    lo[static_cast<std::size_t>(a)] = model.z[static_cast<std::size_t>(a)];
    hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + edge;
  }

  const OffsetTable offsets = build_offsets(d, m, delta);
  const int span = static_cast<int>(std::floor(delta * static_cast<double>(m)));

  auto chunk_fn = [&](std::uint64_t chunk, std::uint64_t begin,
                      std::uint64_t end) -> std::uint64_t {
    Rng rng(derive_seed(seed, streams::kOscillation, chunk));
    std::vector<double> cells(n_cells);
    std::vector<double> prefix(n_cells);
    std::uint64_t hits = 0;
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      std::fill(cells.begin(), cells.end(), 0.0);
      const std::uint64_t atoms = (p_win > 0.0) ? rng.poisson(mean_count) : 0;
      for (std::uint64_t j = 0; j < atoms; ++j) {
        const std::vector<double> zpt = model.sample_z_in_box(rng, lo, hi);
        const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
        std::uint64_t linear = 0;
        std::uint64_t stride = 1;
        bool in_grid = true;
        for (int a = 0; a < d; ++a) {
          const double u =
              (zpt[static_cast<std::size_t>(a)] - model.z[static_cast<std::size_t>(a)]) / edge;
          const int c = static_cast<int>(std::floor(u * static_cast<double>(m)));
          if (c < 0 || c >= m) {
            in_grid = false;
            break;
          }
          linear += static_cast<std::uint64_t>(c) * stride;
          stride *= static_cast<std::uint64_t>(m);
        }
        if (!in_grid) continue;
        double norm2 = 0.0;
        for (int c = 0; c < model.k; ++c)
          norm2 += ypt[static_cast<std::size_t>(c)] * ypt[static_cast<std::size_t>(c)];
        cells[linear] += std::sqrt(norm2) * scale;
      }

      // Inclusive prefix sums along each axis; the node value at multi-index
      // i (0..m-1 per axis) is prefix[i - 1] when every i_a >= 1, else 0.
      prefix = cells;
      std::uint64_t stride = 1;
      for (int a = 0; a < d; ++a) {
        for (std::uint64_t idx = 0; idx < n_cells; ++idx) {
          const std::uint64_t coord = (idx / stride) % static_cast<std::uint64_t>(m);
          if (coord > 0) prefix[idx] += prefix[idx - stride];
        }
        stride *= static_cast<std::uint64_t>(m);
      }
      auto node_value = [&](const std::vector<int>& node) -> double {
        std::uint64_t linear = 0;
        std::uint64_t str = 1;
        for (int a = 0; a < d; ++a) {
          if (node[static_cast<std::size_t>(a)] == 0) return 0.0;
          linear += static_cast<std::uint64_t>(node[static_cast<std::size_t>(a)] - 1) * str;
          str *= static_cast<std::uint64_t>(m);
        }
        return prefix[linear];
      };

      bool hit = false;
      if (d == 1) {
        // Monotone in one dimension: the largest gap within span is always
        // attained at full span (or against the last node).
        for (int i = 0; i < m && !hit; ++i) {
          const int j = std::min(m - 1, i + span);
          const double a_val = (i == 0) ? 0.0 : prefix[static_cast<std::uint64_t>(i - 1)];
          const double b_val = (j == 0) ? 0.0 : prefix[static_cast<std::uint64_t>(j - 1)];
          const double gap = b_val - a_val;
          hit = (threshold > 0.0) ? (gap >= threshold) : (gap > 0.0);
        }
      } else {
        std::vector<int> node(static_cast<std::size_t>(d), 0);
        std::vector<int> other(static_cast<std::size_t>(d));
        while (!hit) {
          const double base = node_value(node);
          for (const auto& off : offsets.offsets) {
            bool ok = true;
            for (int a = 0; a < d; ++a) {
              other[static_cast<std::size_t>(a)] =
                  node[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
              if (other[static_cast<std::size_t>(a)] < 0 ||
                  other[static_cast<std::size_t>(a)] >= m) {
                ok = false;
                break;
              }
            }
            if (!ok) continue;
            const double gap = std::fabs(node_value(other) - base);
            if ((threshold > 0.0) ? (gap >= threshold) : (gap > 0.0)) {
              hit = true;
              break;
            }
          }
          int axis = 0;
          while (axis < d) {
            if (++node[static_cast<std::size_t>(axis)] < m) break;
            node[static_cast<std::size_t>(axis)] = 0;
            ++axis;
          }
          if (axis == d) break;
        }
      }
      if (hit) ++hits;
    }
    return hits;
  };

  const std::vector<std::uint64_t> per_chunk =
      parallel::map_chunks<std::uint64_t>(jobs, replications, 256, chunk_fn);
  std::uint64_t hits = 0;
  for (std::uint64_t c : per_chunk) hits += c;

  OscillationReport rep;
  rep.delta = delta;
  rep.x = x;
  rep.nhf = nhf;
  rep.empirical_tail = static_cast<double>(hits) / static_cast<double>(replications);
  rep.analytic_bound = oscillation_bound(delta, x, nhf, chern, d, OscillationBoundMode::kGrid);
  rep.replications = replications;
  rep.seed = seed;
  rep.vacuous = (chern.value1(x) == 0.0);
  return rep;
}

csv::Table oscillation_to_csv(const std::vector<OscillationReport>& reports) {
  csv::Table table({"delta", "x", "nhf", "empirical_tail", "analytic_bound", "replications",
                    "seed"});
  for (const auto& r : reports) {
    table.add_row({csv::format(r.delta), csv::format(r.x), csv::format(r.nhf),
                   csv::format(r.empirical_tail), csv::format(r.analytic_bound),
                   csv::format(r.replications), csv::format(r.seed)});
  }
  return table;
}

double calibrate_h_x(const ModelSpec& model, double delta, double x) {
  model.validate();
  check_delta(delta);
  ChernoffFunction chern(absolute_laplace_transform(model));
  const ChernoffResult at_x = chern.eval({x});
  if (at_x.diverged || !(at_x.value > 0.0))
    throw config_error("calibrate_h_x: x must have a finite positive rate (above the |Y| mean)");
  const double t = at_x.argmax.at(0);
  if (!(t > 0.0)) throw config_error("calibrate_h_x: x must lie above the mean of |Y|");
  const double l_at_t = chern.source().eval(at_x.argmax);
  const double denom_factor = l_at_t - 1.0;
  if (!(denom_factor > 0.0)) throw config_error("calibrate_h_x: degenerate transform at the tilt");

  const bool marks_depend_on_z = (model.family == Family::SemiParametric);
  if (marks_depend_on_z && model.d != 1)
    throw model_error(
        "calibrate_h_x: location-dependent marks are calibrated in one dimension only");

  const int d = model.d;
  const int m = oscillation_grid_m(delta);
  const double shift = (std::ceil(static_cast<double>(m) * delta) + 2.0) / static_cast<double>(m);

  // Conditional E[e^{t|Y|} | Z in [a,b)] for the one-dimensional Gaussian
  // family; the Y-independent families use L_{|Y|}(t) exactly.
  auto conditional_mgf_interval = [&](double a, double b) -> double {
    const double a_cl = std::max(a, 0.0);
    const double b_cl = std::min(b, 1.0);
    if (!(b_cl > a_cl)) return 1.0;  // empty mass; caller sees P(E)=0 anyway
    const double mb = model.mean_base.at(0);
    const double ms = model.mean_slope.at(0);
    const double sd = model.sd.at(0);
    auto folded = [&](double u) {
      const double mu = mb + ms * u;
      const double s_t = sd * t;
      const double g = std::exp(0.5 * s_t * s_t);
      auto phi = [](double v) { return 0.5 * std::erfc(-v / 1.4142135623730951); };
      return g * (std::exp(t * mu) * phi(mu / sd + s_t) + std::exp(-t * mu) * phi(s_t - mu / sd));
    };
    auto weighted = [&](double u) { return folded(u) * model.density({u}); };
    auto dens = [&](double u) { return model.density({u}); };
    const double mass = quad::adaptive_simpson(dens, a_cl, b_cl, 1e-13);
    if (!(mass > 0.0)) return 1.0;
    return quad::adaptive_simpson(weighted, a_cl, b_cl, 1e-13) / mass;
  };

  std::vector<int> node(static_cast<std::size_t>(d), 0);
  for (int j = 1; j <= 40; ++j) {
    const double h = std::ldexp(1.0, -j);
    const double edge = model.window_edge(h);
    double worst = 0.0;
    std::fill(node.begin(), node.end(), 0);
    bool failed = false;
    while (!failed) {
      double vol_s = 1.0;
      double vol_sp = 1.0;
      for (int a = 0; a < d; ++a) {
        const double s = static_cast<double>(node[static_cast<std::size_t>(a)]) /
                         static_cast<double>(m);
        vol_s *= s;
        vol_sp *= s + shift;
      }
      const double lambda_b = vol_sp - vol_s;
      // P(E_{i,h}) = P(Z in z + edge*[0,s^+)) - P(Z in z + edge*[0,s)).
      double p_outer = 1.0;
      double p_inner = 1.0;
      for (int a = 0; a < d; ++a) {
        const double s = static_cast<double>(node[static_cast<std::size_t>(a)]) /
                         static_cast<double>(m);
        const double z_a = model.z[static_cast<std::size_t>(a)];
        const double outer_hi = z_a + edge * (s + shift);
        const double inner_hi = z_a + edge * s;
        p_outer *= model.axis_cdf(a, outer_hi) - model.axis_cdf(a, z_a);
        p_inner *= model.axis_cdf(a, inner_hi) - model.axis_cdf(a, z_a);
      }
      const double p_event = p_outer - p_inner;
      double numer_factor = denom_factor;
      if (marks_depend_on_z) {
        // One-dimensional slab [z + edge*s, z + edge*s^+).
        const double s = static_cast<double>(node[0]) / static_cast<double>(m);
        numer_factor =
            conditional_mgf_interval(model.z[0] + edge * s, model.z[0] + edge * (s + shift)) - 1.0;
      }
      const double target = model.density_at_z * lambda_b * h * denom_factor;
      const double drift = std::fabs(p_event * numer_factor / target - 1.0);
      worst = std::max(worst, drift);
      if (worst >= kDeltaCap) failed = true;
      int axis = 0;
      while (axis < d) {
        if (++node[static_cast<std::size_t>(axis)] < m) break;
        node[static_cast<std::size_t>(axis)] = 0;
        ++axis;
      }
      if (axis == d) break;
    }
    if (!failed && worst < kDeltaCap) return h;
  }
  throw model_error("calibrate_h_x: no dyadic bandwidth satisfied the drift condition");
}

}  // namespace cedf
