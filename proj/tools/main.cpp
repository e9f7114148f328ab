// cedf: configuration-driven CLI over the compound-empirical-increments
// toolkit. One subcommand per experiment, plus `run` (experiment named in the
// config) and `verify` (the acceptance suite). Exit codes: 0 success,
// 2 configuration error, 3 runtime/model error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cedf/acceptance.hpp"
#include "cedf/blocks.hpp"
#include "cedf/chernoff.hpp"
#include "cedf/config.hpp"
#include "cedf/coupling.hpp"
#include "cedf/csv.hpp"
#include "cedf/errors.hpp"
#include "cedf/experiments.hpp"
#include "cedf/grid.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "cedf/oscillation.hpp"
#include "cedf/rate.hpp"
#include "cedf/rng.hpp"
#include "cedf/streams.hpp"

namespace {

using cedf::config_error;
using cedf::RunConfig;
using nlohmann::json;

std::uint64_t parse_u64_text(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos, 10);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(std::string(what) + " must be an unsigned integer, got '" + text + "'");
  }
}

// ---------------------------------------------------------------------------
// Experiment parameter extraction (experiment.params object in the config).
// ---------------------------------------------------------------------------

double param_double(const json& p, const std::string& key, double dflt) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_number()) throw config_error("param '" + key + "' must be a number");
  return p.at(key).get<double>();
}

std::uint64_t param_u64(const json& p, const std::string& key, std::uint64_t dflt) {
  if (!p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<double>() < 0))
    throw config_error("param '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

int param_int(const json& p, const std::string& key, int dflt, int lo, int hi) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_number_integer()) throw config_error("param '" + key + "' must be an integer");
  const long long v = p.at(key).get<long long>();
  if (v < lo || v > hi)
    throw config_error("param '" + key + "' must lie in [" + std::to_string(lo) + "," +
                       std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::string param_str(const json& p, const std::string& key, const std::string& dflt) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_string()) throw config_error("param '" + key + "' must be a string");
  return p.at(key).get<std::string>();
}

bool param_bool(const json& p, const std::string& key, bool dflt) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_boolean()) throw config_error("param '" + key + "' must be a boolean");
  return p.at(key).get<bool>();
}

std::vector<double> param_vec(const json& p, const std::string& key, std::vector<double> dflt) {
  if (!p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_array() || v.empty()) throw config_error("param '" + key + "' must be a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw config_error("param '" + key + "' must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared run context and result plumbing.
// ---------------------------------------------------------------------------

struct Ctx {
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  bool svg = false;
};

cedf::ExperimentResult make_result(const Ctx& ctx, const std::string& name, cedf::csv::Table table) {
  return cedf::ExperimentResult{name, ctx.cfg.hash_hex(), ctx.seed, std::move(table),
                                ctx.cfg.emit()};
}

// ---------------------------------------------------------------------------
// Minimal SVG line-plot emitter (data plots stay CSV; this is a convenience
// view of distance traces). All numbers go through csv::format so the bytes
// are locale-independent and rerun-stable.
// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

std::string fmt_px(double v) { return cedf::csv::format(std::round(v * 100.0) / 100.0); }

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series) {
  const double width = 640.0;
  const double height = 400.0;
  const double ml = 64.0, mr = 16.0, mt = 30.0, mb = 44.0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax - xmin <= 0.0) xmax = xmin + 1.0;
  if (ymax - ymin <= 0.0) ymax = ymin + 1.0;
  const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  const auto sy = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#8c564b", "#e377c2"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + fmt_px(ml) + "\" y=\"18\" font-family=\"monospace\" font-size=\"13\">" +
         title + "</text>\n";
  // Axes.
  out += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(height - mb) + "\" x2=\"" +
         fmt_px(width - mr) + "\" y2=\"" + fmt_px(height - mb) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(mt) + "\" x2=\"" + fmt_px(ml) +
         "\" y2=\"" + fmt_px(height - mb) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  // Range labels.
  const auto tick = [&](double px, double py, const std::string& text, const char* anchor) {
    return "<text x=\"" + fmt_px(px) + "\" y=\"" + fmt_px(py) +
           "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"" + anchor + "\">" + text +
           "</text>\n";
  };
  out += tick(ml, height - mb + 14.0, cedf::csv::format(xmin), "middle");
  out += tick(width - mr, height - mb + 14.0, cedf::csv::format(xmax), "middle");
  out += tick(0.5 * (ml + width - mr), height - 8.0, x_label, "middle");
  out += tick(ml - 6.0, height - mb, cedf::csv::format(ymin), "end");
  out += tick(ml - 6.0, mt + 8.0, cedf::csv::format(ymax), "end");
  out += tick(ml - 6.0, mt - 8.0, y_label, "end");
  int ci = 0;
  for (const auto& s : series) {
    const std::string color = colors[static_cast<std::size_t>(ci) % colors.size()];
    std::string pts;
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      pts += (pts.empty() ? "" : " ") + fmt_px(sx(x)) + "," + fmt_px(sy(y));
    }
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    const double ly = mt + 14.0 * static_cast<double>(ci);
    out += "<rect x=\"" + fmt_px(width - mr - 150.0) + "\" y=\"" + fmt_px(ly) +
           "\" width=\"10\" height=\"3\" fill=\"" + color + "\"/>\n";
    out += tick(width - mr - 136.0, ly + 5.0, s.label, "start");
    ++ci;
  }
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write " + path);
  out << body;
}

// ---------------------------------------------------------------------------
// Experiment handlers.
// ---------------------------------------------------------------------------

void run_conjugate_table(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const cedf::ChernoffFunction chern(cedf::laplace_transform(model));
  const json params = ctx.cfg.params();
  std::vector<std::vector<double>> points;
  if (params.contains("points")) {
    const json& pts = params.at("points");
    if (!pts.is_array() || pts.empty())
      throw config_error("param 'points' must be a nonempty array");
    for (const json& e : pts) {
      if (e.is_number()) {
        points.push_back({e.get<double>()});
      } else if (e.is_array()) {
        std::vector<double> u;
        for (const json& c : e) {
          if (!c.is_number()) throw config_error("param 'points' entries must be numeric");
          u.push_back(c.get<double>());
        }
        points.push_back(std::move(u));
      } else {
        throw config_error("param 'points' entries must be numbers or arrays");
      }
    }
  } else if (model.k == 1) {
    points = {{0.5}, {1.0}, {2.0}};
  } else {
    throw config_error("conjugate-table: param 'points' is required when k > 1");
  }
  for (const auto& u : points) {
    if (static_cast<int>(u.size()) != model.k)
      throw config_error("conjugate-table: every point must have k components");
  }

  std::vector<std::string> header;
  for (int j = 1; j <= model.k; ++j) header.push_back("u_" + std::to_string(j));
  header.push_back("h_value");
  for (int j = 1; j <= model.k; ++j) header.push_back("argmax_t_" + std::to_string(j));
  header.push_back("iterations");
  cedf::csv::Table table(header);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& u : points) {
    const cedf::ChernoffResult r = chern.eval(u);
    std::vector<std::string> row;
    for (const double c : u) row.push_back(cedf::csv::format(c));
    row.push_back(cedf::csv::format(r.diverged ? inf : r.value));
    for (int j = 0; j < model.k; ++j)
      row.push_back(cedf::csv::format(r.diverged ? nan : r.argmax[static_cast<std::size_t>(j)]));
    row.push_back(cedf::csv::format(static_cast<std::int64_t>(r.iterations)));
    table.add_row(row);
  }
  const auto res = make_result(ctx, "conjugate-table", std::move(table));
  const std::string path = res.write(ctx.out);
  std::cout << "conjugate-table: " << points.size() << " points -> " << path << "\n";
}

void run_rate_table(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  if (model.k != 1) throw config_error("rate-table requires k = 1");
  const cedf::ChernoffFunction chern(cedf::laplace_transform(model));
  const json params = ctx.cfg.params();
  const double base = param_double(params, "slope_base", 0.0);
  const double gain = param_double(params, "slope_gain", 2.0);
  const int p_max = param_int(params, "p_max", 10, 1, 16);
  const auto report = cedf::rate_limit(
      [base, gain](double s) { return std::vector<double>{base + gain * s}; }, 1, chern, p_max);

  cedf::csv::Table table({"p", "value", "kind"});
  for (std::size_t i = 0; i < report.ladder.size(); ++i) {
    table.add_row({cedf::csv::format(static_cast<std::int64_t>(i + 1)),
                   cedf::csv::format(report.ladder[i]), "ladder"});
  }
  table.add_row({cedf::csv::format(static_cast<std::int64_t>(0)),
                 cedf::csv::format(report.quadrature), "quadrature"});
  const auto res = make_result(ctx, "rate-table", std::move(table));
  const std::string path = res.write(ctx.out);
  std::cout << "rate-table: p = 1.." << p_max << ", final gap "
            << cedf::csv::format(report.final_gap) << ", monotone "
            << (report.monotone ? "yes" : "no") << " -> " << path << "\n";
}

void run_ldp_cell(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const json params = ctx.cfg.params();
  const double cell = param_double(params, "cell_measure", 1.0);
  const double x = param_double(params, "x", 2.0);
  const std::vector<double> ladder =
      param_vec(params, "nhf_ladder", {50.0, 100.0, 200.0, 400.0});
  const std::string mode_str = param_str(params, "mode", "exact");
  cedf::LdpMode mode;
  if (mode_str == "exact") {
    mode = cedf::LdpMode::ExactPoisson;
  } else if (mode_str == "mc") {
    mode = cedf::LdpMode::MonteCarlo;
  } else {
    throw config_error("param 'mode' must be \"exact\" or \"mc\"");
  }
  const auto rows = cedf::ldp_cell_check(model, cell, x, ladder, mode, ctx.cfg.replications(),
                                         ctx.seed, ctx.jobs);
  const auto res = make_result(ctx, "ldp-cell", cedf::ldp_to_csv(rows, ctx.seed));
  const std::string path = res.write(ctx.out);
  std::cout << "ldp-cell (" << mode_str << "): " << rows.size() << " ladder points, last value "
            << (rows.back().unresolvable ? std::string("unresolvable")
                                         : cedf::csv::format(rows.back().value))
            << " vs target " << cedf::csv::format(rows.back().target) << " -> " << path << "\n";
}

void run_oscillation(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const json params = ctx.cfg.params();
  const double h = param_double(params, "h", 1.0 / 64.0);
  const std::vector<double> deltas = param_vec(params, "deltas", {0.1, 0.2, 0.4});
  const std::vector<double> xs = param_vec(params, "x", {2.0, 3.0});
  const std::vector<double> nhfs = param_vec(params, "nhf", {20.0, 50.0});
  const std::uint64_t reps = ctx.cfg.replications();
  const double f = model.density_at_z;
  std::vector<cedf::OscillationReport> reports;
  std::uint64_t combo = 0;
  for (const double delta : deltas) {
    for (const double x : xs) {
      for (const double nhf : nhfs) {
        const double n_real = nhf / (h * f);
        if (!(n_real >= 1.0) || n_real > 9e15)
          throw config_error("oscillation: nhf/h/f combination gives an unusable sample size");
        const std::uint64_t n = static_cast<std::uint64_t>(std::llround(n_real));
        reports.push_back(cedf::mc_oscillation_tail(
            model, h, n, delta, x, reps,
            cedf::derive_seed(ctx.seed, cedf::streams::kOscillation, combo), ctx.jobs));
        ++combo;
      }
    }
  }
  int exceeded = 0;
  for (const auto& r : reports)
    if (r.empirical_tail > r.analytic_bound) ++exceeded;
  const auto res = make_result(ctx, "oscillation", cedf::oscillation_to_csv(reports));
  const std::string path = res.write(ctx.out);
  std::cout << "oscillation: " << reports.size() << " combos, " << exceeded
            << " with tail above the analytic bound -> " << path << "\n";
}

void run_coupling(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const cedf::BandwidthSchedule schedule = ctx.cfg.schedule();
  const json params = ctx.cfg.params();
  const std::uint64_t n_max = param_u64(params, "n_max", 10000);
  if (n_max == 0) throw config_error("param 'n_max' must be positive");
  const auto seq = cedf::build_coupling(model, schedule, n_max, ctx.seed);
  cedf::csv::Table table(
      {"index", "h", "p_window", "b", "v", "eta_star", "n_background", "match"});
  std::uint64_t mismatches = 0;
  for (const auto& r : seq) {
    mismatches += r.match ? 0 : 1;
    table.add_row({cedf::csv::format(r.index), cedf::csv::format(r.h),
                   cedf::csv::format(r.p_window),
                   cedf::csv::format(static_cast<std::int64_t>(r.b ? 1 : 0)),
                   cedf::csv::format(r.v), cedf::csv::format(r.eta_star),
                   cedf::csv::format(r.n_background),
                   cedf::csv::format(static_cast<std::int64_t>(r.match ? 1 : 0))});
  }
  const auto res = make_result(ctx, "coupling", std::move(table));
  const std::string path = res.write(ctx.out);
  std::cout << "coupling: " << n_max << " indices, " << mismatches << " mismatches -> " << path
            << "\n";
}

void run_clustering(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const cedf::BandwidthSchedule schedule = ctx.cfg.schedule();
  const json params = ctx.cfg.params();
  cedf::ClusteringParams cp;
  cp.outer_k_min = param_u64(params, "outer_k_min", 2);
  cp.outer_k_max = param_u64(params, "outer_k_max", 40);
  cp.inner_k_min = param_u64(params, "inner_k_min", 2);
  cp.inner_k_max = param_u64(params, "inner_k_max", 4);
  cp.depth = param_int(params, "depth", 2, 1, 8);
  cp.distance_tol = param_double(params, "distance_tol", 1e-3);
  cp.n_limit = param_u64(params, "n_limit", 2'000'000);
  const double f = model.density_at_z;
  const double default_level =
      schedule.mode == cedf::BandwidthMode::Nonstandard ? 1.0 / (schedule.c * f) : 0.5;
  const double level = param_double(params, "level", default_level);
  if (!(level > 0.0)) throw config_error("param 'level' must be positive");

  cedf::ChernoffFunction chern(cedf::laplace_transform(model));
  const cedf::RateLevelSet set(chern, level);
  const cedf::DyadicGrid grid(model.d, cp.depth);
  std::vector<cedf::GridFunction> targets;
  targets.push_back(cedf::zero_rate_function(grid, chern));
  if (model.k == 1) {
    // Extreme constant-slope targets just inside the level boundary.
    const cedf::LevelRoots roots = cedf::chernoff_level_roots(chern, level);
    const double mean = chern.mean()[0];
    for (const auto& side : {roots.lower, roots.upper}) {
      if (!side) continue;
      const double slope = mean + 0.999 * (*side - mean);
      cedf::GridFunction g(grid, 1);
      for (std::uint64_t c = 0; c < grid.cell_count(); ++c)
        g.cell(c)[0] = grid.cell_measure() * slope;
      if (cedf::level_set_contains(g, set)) targets.push_back(std::move(g));
    }
  }

  const auto result = cedf::clustering_run(model, schedule, cedf::BlockSchedule::outer(),
                                           cedf::BlockSchedule::inner(), set, targets, cp,
                                           ctx.seed);
  const auto outer_res =
      make_result(ctx, "clustering-outer", cedf::clustering_outer_to_csv(result.outer, ctx.seed));
  const std::string outer_path = outer_res.write(ctx.out);
  const auto inner_res =
      make_result(ctx, "clustering-inner", cedf::clustering_inner_to_csv(result.inner, ctx.seed));
  const std::string inner_path = inner_res.write(ctx.out);

  double outer_min = std::numeric_limits<double>::infinity();
  for (const auto& row : result.outer) outer_min = std::min(outer_min, row.distance);
  std::cout << "clustering: " << result.outer.size() << " outer blocks (min distance "
            << cedf::csv::format(outer_min) << "), " << result.inner.size()
            << " inner rows over " << targets.size() << " targets -> " << outer_path << ", "
            << inner_path << "\n";

  if (ctx.svg || param_bool(params, "svg", false)) {
    SvgSeries outer_series{"distance to level set", {}};
    for (const auto& row : result.outer)
      outer_series.pts.push_back({static_cast<double>(row.k), row.distance});
    const std::string outer_svg = ctx.out + "/" + outer_res.base_name() + ".svg";
    write_text_file(outer_svg, svg_line_plot("outer distance trace", "k", "distance",
                                             {outer_series}));
    std::vector<SvgSeries> inner_series(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t)
      inner_series[t].label = "target " + std::to_string(t);
    for (const auto& row : result.inner)
      inner_series[row.target].pts.push_back({static_cast<double>(row.k), row.running_min});
    const std::string inner_svg = ctx.out + "/" + inner_res.base_name() + ".svg";
    write_text_file(inner_svg, svg_line_plot("inner running minima", "k", "running min",
                                             inner_series));
    std::cout << "clustering: SVG traces -> " << outer_svg << ", " << inner_svg << "\n";
  }
}

void run_nw_contrast(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const json params = ctx.cfg.params();
  const double c = param_double(params, "c", 2.0);
  const std::uint64_t n_lo = param_u64(params, "n_lo", 1000);
  const std::uint64_t n_hi = param_u64(params, "n_hi", 1000000);
  const int checkpoints = param_int(params, "checkpoints", 32, 2, 4096);
  const cedf::Kernel kernel = cedf::kernel_from_name(param_str(params, "kernel", "box"));
  const int seeds = param_int(params, "seeds", 20, 1, 100000);
  const auto result = cedf::nw_inconsistency_contrast(model, c, n_lo, n_hi, checkpoints, kernel,
                                                      seeds, ctx.seed, ctx.jobs);
  const auto res = make_result(ctx, "nw-contrast", cedf::nw_contrast_to_csv(result, ctx.seed));
  const std::string path = res.write(ctx.out);
  std::cout << "nw-contrast: median oscillation " << cedf::csv::format(result.median_osc_hv)
            << " (nonstandard) vs " << cedf::csv::format(result.median_osc_consistent)
            << " (consistent), ratio " << cedf::csv::format(result.ratio) << " -> " << path
            << "\n";
}

void run_block_discrepancy(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const cedf::BandwidthSchedule schedule = ctx.cfg.schedule();
  const json params = ctx.cfg.params();
  const std::uint64_t k = param_u64(params, "k", 40);
  const double eps = param_double(params, "eps", 0.2);
  const int probes = param_int(params, "probes", 4, 1, 64);
  const auto rows = cedf::block_discrepancy_check(model, schedule, k, eps, probes,
                                                  ctx.cfg.replications(), ctx.seed, ctx.jobs);
  int exceeded = 0;
  for (const auto& r : rows) {
    const double sigma =
        std::sqrt(std::min(r.bound, 1.0) * (1.0 - std::min(r.bound, 1.0)) /
                  static_cast<double>(r.replications));
    if (r.frequency > r.bound + 3.0 * sigma) ++exceeded;
  }
  const auto res =
      make_result(ctx, "block-discrepancy", cedf::block_discrepancy_to_csv(rows, ctx.seed));
  const std::string path = res.write(ctx.out);
  std::cout << "block-discrepancy: " << rows.size() << " probes in block " << k << ", "
            << exceeded << " beyond bound + 3 sigma -> " << path << "\n";
}

void run_local_conditions(const Ctx& ctx) {
  const cedf::ModelSpec model = ctx.cfg.model();
  const json params = ctx.cfg.params();
  const std::vector<double> h_grid = param_vec(params, "h_grid", {0.2, 0.1, 0.05, 0.025});
  const std::uint64_t mc_n = param_u64(params, "mc_n", 200000);
  std::vector<std::vector<double>> t_probes;
  if (params.contains("t_probes")) {
    const json& tp = params.at("t_probes");
    if (!tp.is_array()) throw config_error("param 't_probes' must be an array of arrays");
    for (const json& e : tp) {
      if (!e.is_array()) throw config_error("param 't_probes' must be an array of arrays");
      std::vector<double> t;
      for (const json& c : e) {
        if (!c.is_number()) throw config_error("param 't_probes' entries must be numeric");
        t.push_back(c.get<double>());
      }
      if (static_cast<int>(t.size()) != model.k)
        throw config_error("param 't_probes' entries must have k components");
      t_probes.push_back(std::move(t));
    }
  } else {
    t_probes.push_back(std::vector<double>(static_cast<std::size_t>(model.k), 0.5));
  }
  const auto report = cedf::verify_local_conditions(model, h_grid, t_probes, mc_n, ctx.seed);

  std::vector<std::string> header = {"h", "probe"};
  for (int j = 1; j <= model.k; ++j) header.push_back("t_" + std::to_string(j));
  header.push_back("estimate");
  header.push_back("target");
  header.push_back("std_error");
  cedf::csv::Table table(header);
  for (const auto& row : report.rows) {
    std::vector<std::string> cells = {cedf::csv::format(row.h), row.probe};
    for (int j = 0; j < model.k; ++j) {
      const double tj = row.t.empty() ? 0.0 : row.t[static_cast<std::size_t>(j)];
      cells.push_back(cedf::csv::format(tj));
    }
    cells.push_back(cedf::csv::format(row.estimate));
    cells.push_back(cedf::csv::format(row.target));
    cells.push_back(cedf::csv::format(row.std_error));
    table.add_row(cells);
  }
  const auto res = make_result(ctx, "local-conditions", std::move(table));
  const std::string path = res.write(ctx.out);
  std::cout << "local-conditions: " << report.rows.size() << " rows, drift decreasing: "
            << (report.passes ? "yes" : "no") << " -> " << path << "\n";
}

using Handler = std::function<void(const Ctx&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> m = {
      {"conjugate-table", run_conjugate_table},
      {"rate-table", run_rate_table},
      {"ldp-cell", run_ldp_cell},
      {"oscillation", run_oscillation},
      {"coupling", run_coupling},
      {"clustering", run_clustering},
      {"nw-contrast", run_nw_contrast},
      {"block-discrepancy", run_block_discrepancy},
      {"local-conditions", run_local_conditions},
  };
  return m;
}

void dispatch(const Ctx& ctx) {
  const std::string name = ctx.cfg.experiment();
  const auto it = handlers().find(name);
  if (it == handlers().end()) {
    std::string known;
    for (const auto& [key, fn] : handlers()) {
      (void)fn;
      known += (known.empty() ? "" : ", ") + key;
    }
    throw config_error("unknown experiment '" + name + "' (known: " + known + ")");
  }
  it->second(ctx);
}

json default_config_json(const std::string& experiment) {
  json model;
  if (experiment == "nw-contrast") {
    // The contrast needs a nondegenerate conditional law to be informative.
    model = {{"family", "semiparametric"}, {"k", 1},          {"d", 1},
             {"z", json::array({0.5})},    {"mean_base", json::array({0.0})},
             {"mean_slope", json::array({1.0})},              {"sd", json::array({1.0})}};
  } else {
    model = {{"family", "constant"},
             {"k", 1},
             {"d", 1},
             {"z", json::array({0.5})},
             {"y0", json::array({1.0})}};
  }
  return json{{"model", model},
              {"schedule", {{"mode", "nonstandard"}, {"c", 2.0}}},
              {"experiment", {{"name", experiment}}},
              {"seed", 20260814}};
}

std::uint64_t resolve_seed(bool has_flag, std::uint64_t flag, std::uint64_t fallback) {
  if (has_flag) return flag;
  if (const char* env = std::getenv("APP_SEED")) return parse_u64_text(env, "APP_SEED");
  return fallback;
}

std::string resolve_out(bool has_flag, const std::string& flag, const std::string& fallback) {
  if (has_flag) return flag;
  if (const char* env = std::getenv("APP_OUT")) {
    if (*env != '\0') return env;
  }
  return fallback;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compound empirical increment experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_flag = 0;
  std::string out_flag;
  int jobs = 1;
  auto* opt_config = app.add_option("--config", config_path, "JSON config file");
  auto* opt_seed =
      app.add_option("--seed", seed_flag, "root seed (overrides APP_SEED and the config)");
  auto* opt_out =
      app.add_option("--out", out_flag, "output directory (overrides APP_OUT and the config)");
  app.add_option("--jobs", jobs, "worker bound; results do not depend on it")
      ->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> experiment_subs = {
      {"conjugate-table", "tabulate the Chernoff conjugate at query points"},
      {"rate-table", "rate-functional refinement ladder for a linear slope field"},
      {"ldp-cell", "finite-n single-cell large-deviation check"},
      {"oscillation", "Monte Carlo oscillation tails vs analytic bounds"},
      {"coupling", "empirical/Poisson coupling simulation"},
      {"clustering", "block-subsequence clustering traces"},
      {"nw-contrast", "regression-estimator inconsistency contrast"},
      {"block-discrepancy", "outer-block discrepancy bound check"},
      {"local-conditions", "finite-h drift report for the local conditions"},
  };
  for (const auto& [name, desc] : experiment_subs) {
    auto* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
  }
  auto* run_cmd = app.add_subcommand("run", "run the experiment named in the config");
  run_cmd->fallthrough();
  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  verify_cmd->fallthrough();
  bool full = false;
  verify_cmd->add_flag("--full", full, "include the Monte Carlo criteria");
  bool svg = false;
  app.get_subcommand("clustering")->add_flag("--svg", svg, "emit SVG plots of the traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string selected;
    for (const CLI::App* sub : app.get_subcommands()) selected = sub->get_name();

    if (selected == "verify") {
      cedf::AcceptanceOptions opt;
      opt.full = full;
      opt.jobs = jobs;
      opt.seed = resolve_seed(opt_seed->count() > 0, seed_flag, opt.seed);
      opt.scratch_dir = resolve_out(opt_out->count() > 0, out_flag, "");
      const auto start = std::chrono::steady_clock::now();
      const auto results = cedf::run_acceptance(opt);
      cedf::print_acceptance(results, std::cout);
      const double total =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      int ran = 0, passed = 0;
      for (const auto& r : results) {
        ran += r.ran ? 1 : 0;
        passed += (r.ran && r.pass) ? 1 : 0;
      }
      std::cout << "suite " << (full ? "full" : "fast") << ": " << passed << "/" << ran
                << " criteria passed, " << (results.size() - static_cast<std::size_t>(ran))
                << " skipped; root seed " << opt.seed << "; total "
                << cedf::csv::format(std::round(total * 100.0) / 100.0) << " s\n";
      return cedf::acceptance_exit_code(results);
    }

    RunConfig cfg = [&] {
      if (opt_config->count() > 0) return RunConfig::parse(read_file(config_path));
      if (selected == "run") throw config_error("run requires --config");
      return RunConfig::from_json(default_config_json(selected));
    }();
    if (selected != "run" && cfg.experiment() != selected) {
      json doc = cfg.doc();
      doc["experiment"]["name"] = selected;
      cfg = RunConfig::from_json(std::move(doc));
    }

    Ctx ctx{std::move(cfg), 0, "", jobs, svg};
    ctx.seed = resolve_seed(opt_seed->count() > 0, seed_flag, ctx.cfg.seed());
    ctx.out = resolve_out(opt_out->count() > 0, out_flag, ctx.cfg.out_dir());
    dispatch(ctx);
    return 0;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cedf::model_error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
