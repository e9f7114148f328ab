#include "cedf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cedf/errors.hpp"
#include "cedf/streams.hpp"

namespace cedf {

namespace {

double coord_mean(const std::vector<double>& zpt) {
  double s = 0.0;
  for (double v : zpt) s += v;
  return s / static_cast<double>(zpt.size());
}

void require(bool cond, const std::string& what) {
  if (!cond) throw config_error(what);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::ConstantY: return "constant";
    case Family::BoundedY: return "bounded";
    case Family::SemiParametric: return "semiparametric";
  }
  throw config_error("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "constant") return Family::ConstantY;
  if (name == "bounded") return Family::BoundedY;
  if (name == "semiparametric") return Family::SemiParametric;
  throw config_error("unknown model family: " + name);
}

ModelSpec ModelSpec::constant(int k, int d, std::vector<double> z, std::vector<double> y0) {
  ModelSpec m;
  m.family = Family::ConstantY;
  m.k = k;
  m.d = d;
  m.z = std::move(z);
  m.gamma.assign(static_cast<std::size_t>(d), 0.0);
  m.y0 = std::move(y0);
  m.density_at_z = 1.0;
  m.validate();
  return m;
}

ModelSpec ModelSpec::gaussian(int k, int d, std::vector<double> z, std::vector<double> mean_base,
                              std::vector<double> mean_slope, std::vector<double> sd,
                              std::vector<double> gamma) {
  ModelSpec m;
  m.family = Family::SemiParametric;
  m.k = k;
  m.d = d;
  m.z = std::move(z);
  m.gamma = gamma.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0) : std::move(gamma);
  m.mean_base = std::move(mean_base);
  m.mean_slope = std::move(mean_slope);
  m.sd = std::move(sd);
  m.density_at_z = 1.0;  // placeholder; fixed below
  m.density_at_z = m.density(m.z);
  m.validate();
  return m;
}

ModelSpec ModelSpec::bounded(int k, int d, std::vector<double> z, std::vector<double> y_lo,
                             std::vector<double> y_hi, std::vector<double> gamma) {
  ModelSpec m;
  m.family = Family::BoundedY;
  m.k = k;
  m.d = d;
  m.z = std::move(z);
  m.gamma = gamma.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0) : std::move(gamma);
  m.y_lo = std::move(y_lo);
  m.y_hi = std::move(y_hi);
  m.density_at_z = 1.0;
  m.density_at_z = m.density(m.z);
  m.validate();
  return m;
}

void ModelSpec::validate() const {
  require(k >= 1, "model: k must be >= 1");
  require(d >= 1, "model: d must be >= 1");
  require(static_cast<int>(z.size()) == d, "model: z must have d coordinates");
  for (double za : z) require(za >= 0.0 && za < 1.0, "model: z must lie in [0,1)^d");
  require(static_cast<int>(gamma.size()) == d, "model: gamma must have d entries");
  for (double ga : gamma) require(std::abs(ga) <= 1.9, "model: |gamma| must be <= 1.9");
  switch (family) {
    case Family::ConstantY:
      require(static_cast<int>(y0.size()) == k, "model: y0 must have k entries");
      for (double ga : gamma) require(ga == 0.0, "model: ConstantY requires uniform Z (gamma=0)");
      break;
    case Family::SemiParametric:
      require(static_cast<int>(mean_base.size()) == k, "model: mean_base must have k entries");
      require(static_cast<int>(mean_slope.size()) == k, "model: mean_slope must have k entries");
      require(static_cast<int>(sd.size()) == k, "model: sd must have k entries");
      for (double s : sd) require(s > 0.0, "model: sd must be positive");
      break;
    case Family::BoundedY:
      require(static_cast<int>(y_lo.size()) == k, "model: y_lo must have k entries");
      require(static_cast<int>(y_hi.size()) == k, "model: y_hi must have k entries");
      for (int j = 0; j < k; ++j) {
        require(y_hi[static_cast<std::size_t>(j)] > y_lo[static_cast<std::size_t>(j)],
                "model: need y_hi > y_lo");
      }
      break;
  }
  const double f = density(z);
  require(f > 0.0, "model: density at z must be positive");
  require(std::abs(density_at_z - f) <= 1e-9 * std::max(1.0, f),
          "model: declared density_at_z disagrees with the tilt product at z");
}

double ModelSpec::density(const std::vector<double>& zpt) const {
  if (static_cast<int>(zpt.size()) != d) throw config_error("density: wrong arity");
  double f = 1.0;
  for (int a = 0; a < d; ++a) {
    const double u = zpt[static_cast<std::size_t>(a)];
    if (u < 0.0 || u >= 1.0) return 0.0;
    f *= 1.0 + gamma[static_cast<std::size_t>(a)] * (u - 0.5);
  }
  return f;
}

double ModelSpec::axis_cdf(int a, double u) const {
  const double uc = std::clamp(u, 0.0, 1.0);
  const double g = gamma[static_cast<std::size_t>(a)];
  return uc + 0.5 * g * (uc * uc - uc);
}

double ModelSpec::box_prob(const std::vector<double>& lo, const std::vector<double>& hi) const {
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) {
    throw config_error("box_prob: wrong arity");
  }
  double p = 1.0;
  for (int a = 0; a < d; ++a) {
    const double lo_a = lo[static_cast<std::size_t>(a)];
    const double hi_a = hi[static_cast<std::size_t>(a)];
    if (hi_a <= lo_a) return 0.0;
    p *= std::max(0.0, axis_cdf(a, hi_a) - axis_cdf(a, lo_a));
  }
  return p;
}

double ModelSpec::window_edge(double h) const { return std::pow(h, 1.0 / static_cast<double>(d)); }

double ModelSpec::window_prob(double h) const {
  const double edge = window_edge(h);
  std::vector<double> lo = z, hi = z;
  for (int a = 0; a < d; ++a) hi[static_cast<std::size_t>(a)] += edge;
  return box_prob(lo, hi);
}

namespace {

// Inverse of F(u) = u + (g/2)(u^2 - u) on [0,1]: the CDF of the tilt density
// 1 + g(u - 1/2). Quadratic formula root that stays in [0,1] for |g| < 2.
double invert_axis_cdf(double g, double target) {
  if (std::abs(g) < 1e-12) return target;
  const double b = 1.0 - 0.5 * g;
  const double disc = b * b + 2.0 * g * target;
  const double u = (-b + std::sqrt(std::max(0.0, disc))) / g;
  return std::clamp(u, 0.0, 1.0);
}

}  // namespace

std::vector<double> ModelSpec::sample_z(Rng& rng) const {
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    out[static_cast<std::size_t>(a)] = invert_axis_cdf(gamma[static_cast<std::size_t>(a)], rng.uniform());
  }
  return out;
}

std::vector<double> ModelSpec::sample_z_in_box(Rng& rng, const std::vector<double>& lo,
                                               const std::vector<double>& hi) const {
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double flo = axis_cdf(a, lo[static_cast<std::size_t>(a)]);
    const double fhi = axis_cdf(a, hi[static_cast<std::size_t>(a)]);
    if (!(fhi > flo)) throw config_error("sample_z_in_box: box has zero probability");
    const double target = flo + rng.uniform() * (fhi - flo);
    out[static_cast<std::size_t>(a)] = invert_axis_cdf(gamma[static_cast<std::size_t>(a)], target);
  }
  return out;
}

std::vector<double> ModelSpec::sample_z_outside_box(Rng& rng, const std::vector<double>& lo,
                                                    const std::vector<double>& hi) const {
  if (box_prob(lo, hi) >= 1.0 - 1e-12) {
    throw config_error("sample_z_outside_box: complement has zero probability");
  }
  for (int attempt = 0; attempt < 1 << 24; ++attempt) {
    std::vector<double> cand = sample_z(rng);
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const double v = cand[static_cast<std::size_t>(a)];
      if (v < lo[static_cast<std::size_t>(a)] || v >= hi[static_cast<std::size_t>(a)]) {
        inside = false;
        break;
      }
    }
    if (!inside) return cand;
  }
  throw model_error("sample_z_outside_box: rejection sampling failed to terminate");
}

std::vector<double> ModelSpec::sample_y_given_z(Rng& rng, const std::vector<double>& zpt) const {
  std::vector<double> y(static_cast<std::size_t>(k));
  switch (family) {
    case Family::ConstantY:
      y = y0;
      break;
    case Family::SemiParametric: {
      const double zbar = coord_mean(zpt);
      for (int j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        y[sj] = rng.normal(mean_base[sj] + mean_slope[sj] * zbar, sd[sj]);
      }
      break;
    }
    case Family::BoundedY:
      for (int j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const double u = 0.5 * (rng.uniform() + rng.uniform());  // symmetric triangular on [0,1]
        y[sj] = y_lo[sj] + (y_hi[sj] - y_lo[sj]) * u;
      }
      break;
  }
  return y;
}

std::vector<double> ModelSpec::conditional_mean(const std::vector<double>& zpt) const {
  std::vector<double> m(static_cast<std::size_t>(k));
  switch (family) {
    case Family::ConstantY:
      m = y0;
      break;
    case Family::SemiParametric: {
      const double zbar = coord_mean(zpt);
      for (int j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        m[sj] = mean_base[sj] + mean_slope[sj] * zbar;
      }
      break;
    }
    case Family::BoundedY:
      for (int j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        m[sj] = 0.5 * (y_lo[sj] + y_hi[sj]);
      }
      break;
  }
  return m;
}

BandwidthSchedule BandwidthSchedule::nonstandard(double c) {
  if (!(c > 0.0)) throw config_error("bandwidth schedule: c must be positive");
  BandwidthSchedule s;
  s.mode = BandwidthMode::Nonstandard;
  s.c = c;
  return s;
}

BandwidthSchedule BandwidthSchedule::consistent() {
  BandwidthSchedule s;
  s.mode = BandwidthMode::Consistent;
  return s;
}

BandwidthSchedule BandwidthSchedule::custom(std::vector<double> table) {
  if (table.empty()) throw config_error("bandwidth schedule: empty custom table");
  for (double h : table) {
    if (!(h > 0.0 && h < 1.0)) throw config_error("bandwidth schedule: table entries must be in (0,1)");
  }
  BandwidthSchedule s;
  s.mode = BandwidthMode::Custom;
  s.table = std::move(table);
  return s;
}

double bandwidth(const BandwidthSchedule& schedule, std::uint64_t n) {
  if (n < 1) throw config_error("bandwidth: n must be >= 1");
  const double n3 = static_cast<double>(std::max<std::uint64_t>(n, 3));
  const double nd = static_cast<double>(n);
  double h = 0.0;
  switch (schedule.mode) {
    case BandwidthMode::Nonstandard:
      h = schedule.c * std::log(std::log(n3)) / nd;
      break;
    case BandwidthMode::Consistent: {
      const double ln = std::log(n3);
      h = ln * ln / nd;
      break;
    }
    case BandwidthMode::Custom:
      if (n > schedule.table.size()) throw config_error("bandwidth: n beyond custom table");
      return schedule.table[static_cast<std::size_t>(n - 1)];
  }
  const double hi = 1.0 - std::numeric_limits<double>::epsilon();
  return std::clamp(h, std::numeric_limits<double>::min(), hi);
}

SampleBatch sample_batch(const ModelSpec& model, std::uint64_t n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw config_error("sample_batch: n must be >= 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.n = n;
  batch.k = model.k;
  batch.d = model.d;
  batch.ys.reserve(n * static_cast<std::uint64_t>(model.k));
  batch.zs.reserve(n * static_cast<std::uint64_t>(model.d));
  Rng rng(derive_seed(seed, streams::kBatch));
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::vector<double> zpt = model.sample_z(rng);
    const std::vector<double> y = model.sample_y_given_z(rng, zpt);
    batch.zs.insert(batch.zs.end(), zpt.begin(), zpt.end());
    batch.ys.insert(batch.ys.end(), y.begin(), y.end());
  }
  return batch;
}

csv::Table batch_to_csv(const SampleBatch& batch) {
  std::vector<std::string> header = {"seed", "n", "index"};
  for (int j = 1; j <= batch.k; ++j) header.push_back("y_" + std::to_string(j));
  for (int a = 1; a <= batch.d; ++a) header.push_back("z_" + std::to_string(a));
  csv::Table table(std::move(header));
  for (std::uint64_t i = 0; i < batch.n; ++i) {
    std::vector<std::string> row = {csv::format(batch.seed), csv::format(batch.n), csv::format(i)};
    for (int j = 0; j < batch.k; ++j) row.push_back(csv::format(batch.y(i)[j]));
    for (int a = 0; a < batch.d; ++a) row.push_back(csv::format(batch.zrow(i)[a]));
    table.add_row(std::move(row));
  }
  return table;
}

GridFunction increment_process(const SampleBatch& batch, const ModelSpec& model, double h, int p) {
  if (!(h > 0.0 && h < 1.0)) throw config_error("increment_process: h must be in (0,1)");
  if (p < 1) throw config_error("increment_process: p must be >= 1");
  if (batch.k != model.k || batch.d != model.d) {
    throw config_error("increment_process: batch/model dimension mismatch");
  }
  GridFunction out(DyadicGrid(model.d, p), model.k);
  const double edge = model.window_edge(h);
  const double weight =
      1.0 / (static_cast<double>(batch.n) * h * model.density_at_z);
  std::vector<double> w(static_cast<std::size_t>(model.d));
  std::vector<double> y(static_cast<std::size_t>(model.k));
  for (std::uint64_t i = 0; i < batch.n; ++i) {
    const double* zi = batch.zrow(i);
    bool in_window = true;
    for (int a = 0; a < model.d; ++a) {
      w[static_cast<std::size_t>(a)] = (zi[a] - model.z[static_cast<std::size_t>(a)]) / edge;
      if (w[static_cast<std::size_t>(a)] < 0.0 || w[static_cast<std::size_t>(a)] >= 1.0) {
        in_window = false;
        break;
      }
    }
    if (!in_window) continue;
    const double* yi = batch.y(i);
    for (int j = 0; j < model.k; ++j) y[static_cast<std::size_t>(j)] = yi[j];
    out.add_point(w, y, weight);
  }
  return out;
}

}  // namespace cedf
