#include "cedf/compound_poisson.hpp"

#include <cmath>
#include <cstdint>

#include "cedf/errors.hpp"
#include "cedf/streams.hpp"

namespace cedf {

namespace {

void append_atom(CompoundPoissonRealization& out, std::uint64_t j, const std::vector<double>& zpt,
                 const std::vector<double>& ypt) {
  for (std::uint64_t a = 0; a < out.loc_stride; ++a) out.locs[j * out.loc_stride + a] = zpt[a];
  for (std::uint64_t c = 0; c < out.y_stride; ++c) out.ys[j * out.y_stride + c] = ypt[c];
}

}  // namespace

CompoundPoissonRealization sample_compound_poisson(const ModelSpec& model, double h, double mean,
                                                   std::uint64_t seed) {
  model.validate();
  if (!(h > 0.0 && h < 1.0)) throw config_error("sample_compound_poisson: h must lie in (0,1)");
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw config_error("sample_compound_poisson: mean must be positive and finite");
  Rng rng(derive_seed(seed, streams::kCompoundPoisson));
  CompoundPoissonRealization out;
  out.h = h;
  out.mean = mean;
  out.y_stride = static_cast<std::uint64_t>(model.k);
  out.loc_stride = static_cast<std::uint64_t>(model.d);
  out.eta = rng.poisson(mean);
  out.ys.resize(out.eta * out.y_stride);
  out.locs.resize(out.eta * out.loc_stride);
  for (std::uint64_t j = 0; j < out.eta; ++j) {
    const std::vector<double> zpt = model.sample_z(rng);
    const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
    append_atom(out, j, zpt, ypt);
  }
  return out;
}

CompoundPoissonRealization sample_compound_poisson_windowed(const ModelSpec& model, double h,
                                                            double mean, Rng& rng) {
  if (!(h > 0.0 && h < 1.0))
    throw config_error("sample_compound_poisson_windowed: h must lie in (0,1)");
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw config_error("sample_compound_poisson_windowed: mean must be positive and finite");
  const double p_win = model.window_prob(h);
  CompoundPoissonRealization out;
  out.h = h;
  out.mean = mean;
  out.y_stride = static_cast<std::uint64_t>(model.k);
  out.loc_stride = static_cast<std::uint64_t>(model.d);
  out.eta = (p_win > 0.0) ? rng.poisson(mean * p_win) : 0;
  out.ys.resize(out.eta * out.y_stride);
  out.locs.resize(out.eta * out.loc_stride);
  const double edge = model.window_edge(h);
  std::vector<double> lo(static_cast<std::size_t>(model.d));
  std::vector<double> hi(static_cast<std::size_t>(model.d));
  for (int a = 0; a < model.d; ++a) {
    lo[static_cast<std::size_t>(a)] = model.z[static_cast<std::size_t>(a)];
    hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + edge;
  }
  for (std::uint64_t j = 0; j < out.eta; ++j) {
    const std::vector<double> zpt = model.sample_z_in_box(rng, lo, hi);
    const std::vector<double> ypt = model.sample_y_given_z(rng, zpt);
    append_atom(out, j, zpt, ypt);
  }
  return out;
}

GridFunction poissonized_increment(const std::vector<CompoundPoissonRealization>& realizations,
                                   const ModelSpec& model, double h, int p, bool absolute) {
  model.validate();
  if (!(h > 0.0 && h < 1.0)) throw config_error("poissonized_increment: h must lie in (0,1)");
  if (realizations.empty()) throw config_error("poissonized_increment: no realizations");
  for (const auto& r : realizations) {
    if (r.h != h)
      throw config_error("poissonized_increment: realization bandwidth differs from h");
  }
  const int k_out = absolute ? 1 : model.k;
  DyadicGrid grid(model.d, p);
  GridFunction g(grid, k_out);
  const double n = static_cast<double>(realizations.size());
  const double scale = 1.0 / (n * h * model.density_at_z);
  const double edge = model.window_edge(h);
  std::vector<double> u(static_cast<std::size_t>(model.d));
  std::vector<double> w(static_cast<std::size_t>(k_out));
  for (const auto& r : realizations) {
    for (std::uint64_t j = 0; j < r.eta; ++j) {
      const double* loc = r.loc(j);
      for (int a = 0; a < model.d; ++a)
        u[static_cast<std::size_t>(a)] = (loc[a] - model.z[static_cast<std::size_t>(a)]) / edge;
      const double* y = r.y(j);
      if (absolute) {
        double s2 = 0.0;
        for (int c = 0; c < model.k; ++c) s2 += y[c] * y[c];
        w[0] = std::sqrt(s2);
      } else {
        for (int c = 0; c < model.k; ++c) w[static_cast<std::size_t>(c)] = y[c];
      }
      g.add_point(u, w, scale);
    }
  }
  return g;
}

}  // namespace cedf
