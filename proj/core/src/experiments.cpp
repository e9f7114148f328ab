#include "cedf/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cedf/errors.hpp"
#include "cedf/laplace.hpp"
#include "cedf/parallel.hpp"
#include "cedf/stats.hpp"
#include "cedf/streams.hpp"

namespace cedf {

// ---------------------------------------------------------------------------
// ExperimentResult plumbing.
// ---------------------------------------------------------------------------

std::string ExperimentResult::base_name() const {
  return experiment + "-" + config_hash + "-" + csv::format(seed);
}

std::string ExperimentResult::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / base_name()).string();
  const std::string csv_path = base + ".csv";
  table.write_file(csv_path);
  {
    std::ofstream json(base + ".json", std::ios::binary | std::ios::trunc);
    if (!json) throw std::runtime_error("ExperimentResult: cannot write " + base + ".json");
    json << (config_echo.empty() ? std::string("{}\n") : config_echo);
  }
  {
    // Timestamps live here and only here; the CSV/JSON bodies stay
    // byte-identical across reruns.
    std::ofstream meta(base + ".meta", std::ios::binary | std::ios::trunc);
    if (!meta) throw std::runtime_error("ExperimentResult: cannot write " + base + ".meta");
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32] = {0};
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    meta << "written=" << stamp << "\n";
  }
  return csv_path;
}

// ---------------------------------------------------------------------------
// Finite-n single-cell LDP check.
// ---------------------------------------------------------------------------

namespace {

void check_ladder(const std::vector<double>& ladder) {
  if (ladder.empty()) throw config_error("ldp_cell_check: empty nhf ladder");
  double prev = 0.0;
  for (double v : ladder) {
    if (!(v > prev)) throw config_error("ldp_cell_check: ladder must be positive increasing");
    prev = v;
  }
}

bool is_unit_marks(const ModelSpec& model) {
  return model.family == Family::ConstantY && model.k == 1 && model.y0.size() == 1 &&
         model.y0[0] == 1.0;
}

}  // namespace

std::vector<LdpCellRow> ldp_cell_check(const ModelSpec& model, double cell_measure, double x,
                                       const std::vector<double>& nhf_ladder, LdpMode mode,
                                       std::uint64_t replications, std::uint64_t seed, int jobs) {
  model.validate();
  if (!(cell_measure > 0.0 && cell_measure <= 1.0))
    throw config_error("ldp_cell_check: cell measure must lie in (0,1]");
  if (!(x >= 0.0)) throw config_error("ldp_cell_check: x must be nonnegative");
  check_ladder(nhf_ladder);
  if (mode == LdpMode::ExactPoisson && !is_unit_marks(model))
    throw config_error("ldp_cell_check: exact mode requires unit marks (ConstantY, k=1, y0=1)");
  if (mode == LdpMode::MonteCarlo && model.k != 1)
    throw config_error("ldp_cell_check: Monte Carlo mode requires scalar marks");
  if (mode == LdpMode::MonteCarlo && replications == 0)
    throw config_error("ldp_cell_check: replications must be >= 1");
  if (jobs < 1) throw config_error("ldp_cell_check: jobs must be >= 1");

  ChernoffFunction chern(laplace_transform(model));
  const double target = cell_measure * chern.value1(x / cell_measure);

  std::vector<LdpCellRow> rows;
  rows.reserve(nhf_ladder.size());
  for (std::size_t li = 0; li < nhf_ladder.size(); ++li) {
    const double nhf = nhf_ladder[li];
    const double mu = nhf * cell_measure;
    const double count_threshold = x * nhf;
    LdpCellRow row;
    row.nhf = nhf;
    row.target = target;
    if (mode == LdpMode::ExactPoisson) {
      const std::int64_t kk = static_cast<std::int64_t>(std::ceil(count_threshold));
      const double log_tail = stats::log_poisson_upper_tail(mu, kk);
      row.value = -log_tail / nhf;
      row.mc_error = 0.0;
      row.unresolvable = false;
    } else {
      const std::uint64_t ladder_seed = derive_seed(seed, streams::kLdp, li);
      auto chunk_fn = [&](std::uint64_t chunk, std::uint64_t begin,
                          std::uint64_t end) -> std::uint64_t {
        Rng rng(derive_seed(ladder_seed, streams::kLdp, chunk));
        std::uint64_t hits = 0;
        for (std::uint64_t r = begin; r < end; ++r) {
          const long atoms = rng.poisson(mu);
          double total = 0.0;
          for (long j = 0; j < atoms; ++j) {
            total += model.sample_y_given_z(rng, model.z)[0];
          }
          if (total >= count_threshold) ++hits;
        }
        return hits;
      };
      const auto per_chunk =
          parallel::map_chunks<std::uint64_t>(jobs, replications, 8192, chunk_fn);
      std::uint64_t hits = 0;
      for (std::uint64_t c : per_chunk) hits += c;
      const double freq = static_cast<double>(hits) / static_cast<double>(replications);
      row.unresolvable = freq < 10.0 / static_cast<double>(replications);
      if (row.unresolvable) {
        row.value = std::numeric_limits<double>::quiet_NaN();
        row.mc_error = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.value = -std::log(freq) / nhf;
        const double sigma_freq =
            std::sqrt(freq * (1.0 - freq) / static_cast<double>(replications));
        row.mc_error = sigma_freq / (freq * nhf);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

csv::Table ldp_to_csv(const std::vector<LdpCellRow>& rows, std::uint64_t seed) {
  csv::Table table({"nhf", "value", "target", "mc_error", "seed"});
  for (const auto& r : rows) {
    table.add_row({csv::format(r.nhf),
                   r.unresolvable ? std::string("unresolvable") : csv::format(r.value),
                   csv::format(r.target),
                   r.unresolvable ? std::string("unresolvable") : csv::format(r.mc_error),
                   csv::format(seed)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Clustering runs.
// ---------------------------------------------------------------------------

namespace {

SampleBatch batch_prefix(const SampleBatch& full, std::uint64_t n) {
  SampleBatch sub;
  sub.seed = full.seed;
  sub.n = n;
  sub.k = full.k;
  sub.d = full.d;
  sub.ys.assign(full.ys.begin(),
                full.ys.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::uint64_t>(full.k)));
  sub.zs.assign(full.zs.begin(),
                full.zs.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::uint64_t>(full.d)));
  return sub;
}

}  // namespace

ClusteringResult clustering_run(const ModelSpec& model, const BandwidthSchedule& schedule,
                                const BlockSchedule& outer, const BlockSchedule& inner,
                                const RateLevelSet& set, const std::vector<GridFunction>& targets,
                                const ClusteringParams& params, std::uint64_t seed) {
  model.validate();
  if (outer.kind != BlockKind::Outer || inner.kind != BlockKind::Inner)
    throw config_error("clustering_run: schedules must be (outer, inner)");
  if (params.outer_k_min < 1 || params.outer_k_min > params.outer_k_max)
    throw config_error("clustering_run: bad outer k range");
  if (params.inner_k_min < 2 || params.inner_k_min > params.inner_k_max)
    throw config_error("clustering_run: bad inner k range (k >= 2)");
  DyadicGrid trace_grid(model.d, params.depth);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const GridFunction& g = targets[t];
    if (!(g.grid() == trace_grid) || g.k() != model.k)
      throw config_error("clustering_run: target shape does not match the trace grid");
    if (!level_set_contains(g, set))
      throw config_error("clustering_run: target outside the level set");
  }

  std::uint64_t n_max = 0;
  try {
    n_max = outer.n(params.outer_k_max);
  } catch (const std::overflow_error&) {
    throw config_error("clustering_run: outer endpoint exceeds 64-bit range");
  }
  if (n_max > params.n_limit)
    throw config_error("clustering_run: outer endpoint exceeds the trajectory budget");

  ClusteringResult result;

  // Outer trace: one trajectory, prefix increments at the block endpoints.
  const SampleBatch trajectory =
      sample_batch(model, n_max, derive_seed(seed, streams::kClusteringOuter));
  for (std::uint64_t k = params.outer_k_min; k <= params.outer_k_max; ++k) {
    const std::uint64_t n_k = outer.n(k);
    const double h = bandwidth(schedule, n_k);
    const SampleBatch prefix = batch_prefix(trajectory, n_k);
    const GridFunction g = increment_process(prefix, model, h, params.depth);
    const DistanceResult dist = distance_to_level_set(g, set, params.distance_tol);
    ClusteringOuterRow row;
    row.k = k;
    row.n = n_k;
    row.h = h;
    row.distance = dist.distance;
    result.outer.push_back(row);
  }

  // Inner trace: block-restricted increments over disjoint index ranges.
  std::vector<double> running_min(targets.size(), std::numeric_limits<double>::infinity());
  const double f_z = model.density_at_z;
  std::vector<double> lo(static_cast<std::size_t>(model.d));
  std::vector<double> hi(static_cast<std::size_t>(model.d));
  for (std::uint64_t k = params.inner_k_min; k <= params.inner_k_max; ++k) {
    BlockRange range;
    try {
      range = inner.range(k);
    } catch (const std::overflow_error&) {
      throw config_error("clustering_run: inner block endpoint exceeds 64-bit range");
    }
    const std::uint64_t len = range.hi - range.lo;
    const double h = bandwidth(schedule, range.hi);
    const double p_win = model.window_prob(h);
    const double edge = model.window_edge(h);
    for (int a = 0; a < model.d; ++a) {
      lo[static_cast<std::size_t>(a)] = model.z[static_cast<std::size_t>(a)];
      hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + edge;
    }
    Rng rng(derive_seed(seed, streams::kClusteringInner, k));
    const long hit_count = rng.binomial(len, p_win);
    GridFunction g(trace_grid, model.k);
    const double scale = 1.0 / (static_cast<double>(range.hi) * h * f_z);
    std::vector<double> u(static_cast<std::size_t>(model.d));
    for (long j = 0; j < hit_count; ++j) {
      const std::vector<double> zpt = model.sample_z_in_box(rng, lo, hi);
      const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
      for (int a = 0; a < model.d; ++a)
        u[static_cast<std::size_t>(a)] =
            (zpt[static_cast<std::size_t>(a)] - model.z[static_cast<std::size_t>(a)]) / edge;
      g.add_point(u, ypt, scale);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double dist = sup_node_distance(g, targets[t]);
      running_min[t] = std::min(running_min[t], dist);
      ClusteringInnerRow row;
      row.k = k;
      row.n = range.hi;
      row.h = h;
      row.target = t;
      row.distance = dist;
      row.running_min = running_min[t];
      result.inner.push_back(row);
    }
  }
  return result;
}

csv::Table clustering_outer_to_csv(const std::vector<ClusteringOuterRow>& rows,
                                   std::uint64_t seed) {
  csv::Table table({"k", "n", "h", "distance", "seed"});
  for (const auto& r : rows) {
    table.add_row({csv::format(r.k), csv::format(r.n), csv::format(r.h), csv::format(r.distance),
                   csv::format(seed)});
  }
  return table;
}

csv::Table clustering_inner_to_csv(const std::vector<ClusteringInnerRow>& rows,
                                   std::uint64_t seed) {
  csv::Table table({"k", "n", "h", "target", "distance", "running_min", "seed"});
  for (const auto& r : rows) {
    table.add_row({csv::format(r.k), csv::format(r.n), csv::format(r.h),
                   csv::format(static_cast<std::uint64_t>(r.target)), csv::format(r.distance),
                   csv::format(r.running_min), csv::format(seed)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Nadaraya-Watson.
// ---------------------------------------------------------------------------

Kernel kernel_from_name(const std::string& name) {
  if (name == "box") return Kernel::Box;
  if (name == "triangle") return Kernel::Triangle;
  throw config_error("kernel_from_name: unknown kernel: " + name);
}

std::string kernel_name(Kernel k) { return k == Kernel::Box ? "box" : "triangle"; }

namespace {

double kernel_weight(Kernel kernel, const double* u, int d) {
  double w = 1.0;
  for (int a = 0; a < d; ++a) {
    if (u[a] < 0.0 || u[a] >= 1.0) return 0.0;
    if (kernel == Kernel::Triangle) w *= 1.0 - std::fabs(2.0 * u[a] - 1.0);
  }
  return w;
}

}  // namespace

NwEstimate nw_estimate(const SampleBatch& batch, const ModelSpec& model, Kernel kernel, double h) {
  if (!(h > 0.0 && h < 1.0)) throw config_error("nw_estimate: h must lie in (0,1)");
  const double edge = model.window_edge(h);
  NwEstimate out;
  out.value.assign(static_cast<std::size_t>(batch.k), 0.0);
  double denom = 0.0;
  std::vector<double> u(static_cast<std::size_t>(batch.d));
  for (std::uint64_t i = 0; i < batch.n; ++i) {
    const double* zrow = batch.zrow(i);
    for (int a = 0; a < batch.d; ++a)
      u[static_cast<std::size_t>(a)] = (zrow[a] - model.z[static_cast<std::size_t>(a)]) / edge;
    const double w = kernel_weight(kernel, u.data(), batch.d);
    if (w <= 0.0) continue;
    denom += w;
    const double* y = batch.y(i);
    for (int c = 0; c < batch.k; ++c) out.value[static_cast<std::size_t>(c)] += w * y[c];
  }
  out.defined = denom > 0.0;
  if (out.defined) {
    for (double& v : out.value) v /= denom;
  }
  return out;
}

NwContrastResult nw_inconsistency_contrast(const ModelSpec& model, double c, std::uint64_t n_lo,
                                           std::uint64_t n_hi, int n_checkpoints, Kernel kernel,
                                           int n_seeds, std::uint64_t seed, int jobs) {
  model.validate();
  if (!(c > 0.0)) throw config_error("nw_inconsistency_contrast: c must be positive");
  if (n_lo < 3 || n_lo >= n_hi) throw config_error("nw_inconsistency_contrast: bad n range");
  if (n_checkpoints < 2) throw config_error("nw_inconsistency_contrast: need >= 2 checkpoints");
  if (n_seeds < 1) throw config_error("nw_inconsistency_contrast: need >= 1 seed");
  if (jobs < 1) throw config_error("nw_inconsistency_contrast: jobs must be >= 1");

  NwContrastResult result;
  const double log_lo = std::log(static_cast<double>(n_lo));
  const double log_hi = std::log(static_cast<double>(n_hi));
  for (int i = 0; i < n_checkpoints; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_checkpoints - 1);
    const std::uint64_t n =
        static_cast<std::uint64_t>(std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
    if (result.checkpoints.empty() || n > result.checkpoints.back())
      result.checkpoints.push_back(n);
  }
  const std::size_t m = result.checkpoints.size();
  const std::size_t upper_begin = m / 2;

  const BandwidthSchedule hv = BandwidthSchedule::nonstandard(c);
  const BandwidthSchedule consistent = BandwidthSchedule::consistent();
  const std::vector<double> r_true = model.conditional_mean(model.z);

  auto seed_fn = [&](std::uint64_t chunk, std::uint64_t begin,
                     std::uint64_t end) -> std::vector<NwContrastSeedRow> {
    (void)chunk;
    std::vector<NwContrastSeedRow> rows;
    for (std::uint64_t s = begin; s < end; ++s) {
      const SampleBatch stream =
          sample_batch(model, n_hi, derive_seed(seed, streams::kNwContrast, s));
      NwContrastSeedRow row;
      row.seed_index = s;
      for (int mode = 0; mode < 2; ++mode) {
        const BandwidthSchedule& sched = (mode == 0) ? hv : consistent;
        double osc = std::numeric_limits<double>::quiet_NaN();
        std::uint64_t undefined = 0;
        for (std::size_t ci = 0; ci < m; ++ci) {
          const std::uint64_t n = result.checkpoints[ci];
          const double h = bandwidth(sched, n);
          const SampleBatch prefix = batch_prefix(stream, n);
          const NwEstimate est = nw_estimate(prefix, model, kernel, h);
          if (!est.defined) {
            ++undefined;
            continue;
          }
          if (ci < upper_begin) continue;
          double dev2 = 0.0;
          for (int cc = 0; cc < model.k; ++cc) {
            const double dv =
                est.value[static_cast<std::size_t>(cc)] - r_true[static_cast<std::size_t>(cc)];
            dev2 += dv * dv;
          }
          const double dev = std::sqrt(dev2);
          if (std::isnan(osc) || dev > osc) osc = dev;
        }
        if (mode == 0) {
          row.osc_hv = osc;
          row.undefined_hv = undefined;
        } else {
          row.osc_consistent = osc;
          row.undefined_consistent = undefined;
        }
      }
      rows.push_back(row);
    }
    return rows;
  };

  const auto chunks = parallel::map_chunks<std::vector<NwContrastSeedRow>>(
      jobs, static_cast<std::uint64_t>(n_seeds), 1, seed_fn);
  for (const auto& chunk : chunks)
    result.rows.insert(result.rows.end(), chunk.begin(), chunk.end());

  auto median_of = [](std::vector<double> values) -> double {
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return std::isnan(v); }),
                 values.end());
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
  };
  std::vector<double> hv_oscs, cons_oscs;
  for (const auto& row : result.rows) {
    hv_oscs.push_back(row.osc_hv);
    cons_oscs.push_back(row.osc_consistent);
  }
  result.median_osc_hv = median_of(hv_oscs);
  result.median_osc_consistent = median_of(cons_oscs);
  result.ratio = result.median_osc_hv / result.median_osc_consistent;
  return result;
}

csv::Table nw_contrast_to_csv(const NwContrastResult& result, std::uint64_t seed) {
  csv::Table table(
      {"seed_index", "osc_hv", "osc_consistent", "undefined_hv", "undefined_consistent", "seed"});
  for (const auto& r : result.rows) {
    table.add_row({csv::format(r.seed_index),
                   std::isnan(r.osc_hv) ? std::string("undefined") : csv::format(r.osc_hv),
                   std::isnan(r.osc_consistent) ? std::string("undefined")
                                                : csv::format(r.osc_consistent),
                   csv::format(r.undefined_hv), csv::format(r.undefined_consistent),
                   csv::format(seed)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Outer-block discrepancy bound.
// ---------------------------------------------------------------------------

std::vector<BlockDiscrepancyRow> block_discrepancy_check(const ModelSpec& model,
                                                         const BandwidthSchedule& schedule,
                                                         std::uint64_t k, double eps, int n_probes,
                                                         std::uint64_t replications,
                                                         std::uint64_t seed, int jobs) {
  model.validate();
  if (k < 2) throw config_error("block_discrepancy_check: k must be >= 2");
  if (!(eps > 0.0)) throw config_error("block_discrepancy_check: eps must be positive");
  if (n_probes < 1) throw config_error("block_discrepancy_check: n_probes must be >= 1");
  if (replications == 0) throw config_error("block_discrepancy_check: replications must be >= 1");
  if (jobs < 1) throw config_error("block_discrepancy_check: jobs must be >= 1");

  const BlockSchedule outer = BlockSchedule::outer();
  const BlockRange range = outer.range(k);
  const std::uint64_t len = range.hi - range.lo;
  if (len < 2) throw config_error("block_discrepancy_check: block has no interior probes");

  std::vector<std::uint64_t> probes;
  for (int j = 0; j < n_probes; ++j) {
    const double t = (n_probes == 1) ? 0.0
                                     : static_cast<double>(j) / static_cast<double>(n_probes - 1);
    const std::uint64_t n =
        range.lo + 1 + static_cast<std::uint64_t>(std::llround(t * static_cast<double>(len - 2)));
    if (probes.empty() || n > probes.back()) probes.push_back(n);
  }

  const double n_k = static_cast<double>(range.hi);
  const double h = bandwidth(schedule, range.hi);
  const double f_z = model.density_at_z;
  const double p_win = model.window_prob(h);
  const double edge = model.window_edge(h);
  ChernoffFunction habs(absolute_laplace_transform(model));

  std::vector<double> lo(static_cast<std::size_t>(model.d));
  std::vector<double> hi(static_cast<std::size_t>(model.d));
  for (int a = 0; a < model.d; ++a) {
    lo[static_cast<std::size_t>(a)] = model.z[static_cast<std::size_t>(a)];
    hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + edge;
  }

  std::vector<BlockDiscrepancyRow> rows;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const std::uint64_t n = probes[pi];
    const std::uint64_t tail = range.hi - n;
    const double mu = static_cast<double>(tail) * p_win;
    const double threshold = eps * n_k * h * f_z;
    const std::uint64_t probe_seed = derive_seed(seed, streams::kBlockDiscrepancy, pi);
    auto chunk_fn = [&](std::uint64_t chunk, std::uint64_t begin,
                        std::uint64_t end) -> std::uint64_t {
      Rng rng(derive_seed(probe_seed, streams::kBlockDiscrepancy, chunk));
      std::uint64_t hits = 0;
      for (std::uint64_t r = begin; r < end; ++r) {
        const long atoms = rng.poisson(mu);
        double total = 0.0;
        for (long j = 0; j < atoms; ++j) {
          const std::vector<double> zpt = model.sample_z_in_box(rng, lo, hi);
          const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
          double norm2 = 0.0;
          for (double y : ypt) norm2 += y * y;
          total += std::sqrt(norm2);
        }
        if (total > threshold) ++hits;
      }
      return hits;
    };
    const auto per_chunk = parallel::map_chunks<std::uint64_t>(jobs, replications, 4096, chunk_fn);
    std::uint64_t hits = 0;
    for (std::uint64_t c : per_chunk) hits += c;

    BlockDiscrepancyRow row;
    row.k = k;
    row.n = n;
    row.n_k = range.hi;
    row.eps = eps;
    row.frequency = static_cast<double>(hits) / static_cast<double>(replications);
    const double arg = eps * n_k / static_cast<double>(tail);
    const double rate = habs.value1(arg);
    row.bound = std::isinf(rate)
                    ? 0.0
                    : std::exp(-static_cast<double>(tail) * h * f_z * rate);
    row.replications = replications;
    rows.push_back(row);
  }
  return rows;
}

csv::Table block_discrepancy_to_csv(const std::vector<BlockDiscrepancyRow>& rows,
                                    std::uint64_t seed) {
  csv::Table table({"k", "n", "n_k", "eps", "frequency", "bound", "replications", "seed"});
  for (const auto& r : rows) {
    table.add_row({csv::format(r.k), csv::format(r.n), csv::format(r.n_k), csv::format(r.eps),
                   csv::format(r.frequency), csv::format(r.bound), csv::format(r.replications),
                   csv::format(seed)});
  }
  return table;
}

}  // namespace cedf
