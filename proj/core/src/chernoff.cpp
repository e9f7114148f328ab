#include "cedf/chernoff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cedf/errors.hpp"

namespace cedf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Solve (A + lambda I) s = g for small dense symmetric A (row-major k x k)
// by Gaussian elimination with partial pivoting. Returns false on a
// (numerically) singular system.
bool solve_damped(std::vector<double> A, double lambda, std::vector<double> g,
                  std::vector<double>& s) {
  const std::size_t k = g.size();
  for (std::size_t i = 0; i < k; ++i) A[i * k + i] += lambda;
  s.assign(k, 0.0);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(A[r * k + col]) > std::abs(A[pivot * k + col])) pivot = r;
    }
    if (std::abs(A[pivot * k + col]) < 1e-300) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(A[pivot * k + c], A[col * k + c]);
      std::swap(g[pivot], g[col]);
    }
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = A[r * k + col] / A[col * k + col];
      for (std::size_t c = col; c < k; ++c) A[r * k + c] -= f * A[col * k + c];
      g[r] -= f * g[col];
    }
  }
  for (std::size_t ri = k; ri-- > 0;) {
    double v = g[ri];
    for (std::size_t c = ri + 1; c < k; ++c) v -= A[ri * k + c] * s[c];
    s[ri] = v / A[ri * k + ri];
  }
  for (double v : s) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

ChernoffFunction::ChernoffFunction(LaplaceTransform source, ChernoffOptions opt)
    : source_(std::move(source)), opt_(opt) {
  if (source_.dim < 1) throw config_error("ChernoffFunction: dim must be >= 1");
  if (!source_.eval || !source_.grad) {
    throw config_error("ChernoffFunction: source needs eval and grad");
  }
  if (static_cast<int>(source_.mean.size()) != source_.dim) {
    throw config_error("ChernoffFunction: mean arity mismatch");
  }
  const std::vector<double> zero(static_cast<std::size_t>(source_.dim), 0.0);
  const double l0 = source_.eval(zero);
  if (!std::isfinite(l0) || std::abs(l0 - 1.0) > 1e-9) {
    throw model_error("ChernoffFunction: L(0) must be finite and equal 1");
  }
}

double ChernoffFunction::default_tol() const {
  if (opt_.tol > 0.0) return opt_.tol;
  return source_.dim == 1 ? 1e-8 : 1e-6;
}

ChernoffResult ChernoffFunction::eval(const std::vector<double>& u, double tol) const {
  if (static_cast<int>(u.size()) != source_.dim) throw config_error("chernoff eval: arity mismatch");
  if (!(tol > 0.0)) throw config_error("chernoff eval: tol must be positive");

  const std::size_t k = u.size();
  auto phi = [&](const std::vector<double>& t) -> double {
    const double L = source_.eval(t);
    if (!std::isfinite(L)) return -kInf;  // overflow along the probe: reject
    return dot(t, u) - L + 1.0;
  };
  auto hess_of_L = [&](const std::vector<double>& t) -> std::vector<double> {
    if (source_.hess) return source_.hess(t);
    // Central differences of the gradient.
    std::vector<double> H(k * k, 0.0);
    std::vector<double> tp = t, tm = t;
    for (std::size_t j = 0; j < k; ++j) {
      const double step = 1e-6 * (1.0 + std::abs(t[j]));
      tp[j] = t[j] + step;
      tm[j] = t[j] - step;
      const auto gp = source_.grad(tp);
      const auto gm = source_.grad(tm);
      for (std::size_t i = 0; i < k; ++i) H[i * k + j] = (gp[i] - gm[i]) / (2.0 * step);
      tp[j] = t[j];
      tm[j] = t[j];
    }
    // Symmetrize.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double m = 0.5 * (H[i * k + j] + H[j * k + i]);
        H[i * k + j] = H[j * k + i] = m;
      }
    }
    return H;
  };

  std::vector<double> t(k, 0.0);
  double val = 0.0;  // phi(0) = <0,u> - L(0) + 1 = 0 exactly
  std::vector<double> best_t = t;
  double best_val = val;
  const double gnorm_floor = 1e-10 * (1.0 + norm2(u));
  int stall = 0;
  int iter = 0;
  std::vector<double> g(k), s(k);

  for (; iter < opt_.max_iter; ++iter) {
    if (val > opt_.ceiling) {
      return ChernoffResult{kInf, {}, iter, true};
    }
    const auto gradL = source_.grad(t);
    for (std::size_t j = 0; j < k; ++j) g[j] = u[j] - gradL[j];
    const double gn = norm2(g);
    // Below the gradient floor the supremum is either attained here or
    // approached along a recession direction (e.g. u on the boundary of the
    // mark support); keep polishing while steps still improve the value in
    // floating point, so asymptotic values are reached exactly.
    const bool polishing = gn <= gnorm_floor;
    if (polishing && gn == 0.0) break;

    const auto H = hess_of_L(t);
    double lambda = 0.0;
    bool have_step = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      if (solve_damped(H, lambda, g, s) && dot(g, s) > 0.0) {
        have_step = true;
        break;
      }
      lambda = lambda == 0.0 ? 1e-10 : lambda * 10.0;
    }
    if (!have_step) s = g;  // gradient fallback

    const double slope = dot(g, s);
    double alpha = 1.0;
    double new_val = -kInf;
    std::vector<double> t_new(k);
    bool accepted = false;
    while (alpha >= 1e-14) {
      for (std::size_t j = 0; j < k; ++j) t_new[j] = t[j] + alpha * s[j];
      new_val = phi(t_new);
      if (std::isfinite(new_val) && new_val >= val + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    const double improvement = new_val - val;
    t.swap(t_new);
    val = new_val;
    if (val > best_val) {
      best_val = val;
      best_t = t;
    }
    if (polishing) {
      if (improvement <= 0.0) break;
      continue;  // ride the recession direction until the value is float-exact
    }
    if (improvement < std::max(1e-18, 1e-15 * std::abs(val))) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }
  }

  (void)tol;  // the stagnation stop already exceeds every supported tol
  if (best_val > opt_.ceiling) return ChernoffResult{kInf, {}, iter, true};

  // The loop can stop at the iteration cap while still climbing a recession
  // ray whose value passes the ceiling only much further out. phi is concave,
  // so witnessing any probe value above the ceiling certifies divergence.
  {
    const auto gradL = source_.grad(t);
    std::vector<double> gd(k);
    for (std::size_t j = 0; j < k; ++j) gd[j] = u[j] - gradL[j];
    if (norm2(gd) > gnorm_floor) {
      std::vector<double> probe(k);
      for (const std::vector<double>* dir : {&gd, &t}) {
        const double dn = norm2(*dir);
        if (!(dn > 0.0) || !std::isfinite(dn)) continue;
        for (double tau = 1e4; tau <= 1e18; tau *= 100.0) {
          for (std::size_t j = 0; j < k; ++j) {
            probe[j] = t[j] + (tau / dn) * (*dir)[j];
          }
          if (phi(probe) > opt_.ceiling) return ChernoffResult{kInf, {}, iter, true};
        }
      }
    }
  }
  return ChernoffResult{best_val, best_t, iter, false};
}

double ChernoffFunction::value(const std::vector<double>& u) const {
  const auto r = eval(u);
  return r.diverged ? kInf : r.value;
}

double ChernoffFunction::value1(double x) const {
  if (source_.dim != 1) throw config_error("value1: k must be 1");
  return value(std::vector<double>{x});
}

ChernoffResult chernoff_eval(const ChernoffFunction& chern, const std::vector<double>& u,
                             double tol) {
  return chern.eval(u, tol);
}

namespace {

// Bisection helper: predicate(x) = "h(x) >= level" is monotone on each side
// of the mean; returns the sublevel-set boundary between inside (predicate
// false) and outside (predicate true).
double bisect_boundary(const std::function<bool(double)>& outside, double in_x, double out_x) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (in_x + out_x);
    if (mid == in_x || mid == out_x) break;
    if (outside(mid)) {
      out_x = mid;
    } else {
      in_x = mid;
    }
  }
  return 0.5 * (in_x + out_x);
}

}  // namespace

LevelRoots chernoff_level_roots(const ChernoffFunction& chern, double level) {
  if (chern.dim() != 1) throw config_error("chernoff_level_roots: k must be 1");
  if (!(level > 0.0)) throw config_error("chernoff_level_roots: level must be positive");
  const double mean = chern.mean()[0];
  auto outside = [&](double x) { return chern.value1(x) >= level; };
  LevelRoots roots;

  constexpr double kCap = 1e12;
  // Upper side.
  {
    double step = 1.0;
    double hi = mean + step;
    while (!outside(hi) && step < kCap) {
      step *= 2.0;
      hi = mean + step;
    }
    if (outside(hi)) roots.upper = bisect_boundary(outside, mean, hi);
  }
  // Lower side.
  {
    double step = 1.0;
    double lo = mean - step;
    while (!outside(lo) && step < kCap) {
      step *= 2.0;
      lo = mean - step;
    }
    if (outside(lo)) roots.lower = bisect_boundary(outside, mean, lo);
  }
  return roots;
}

SuperlinearityReport superlinearity_certificate(const ChernoffFunction& chern,
                                                const std::vector<double>& radii,
                                                const std::vector<std::vector<double>>& directions,
                                                double threshold) {
  if (radii.size() < 2) throw config_error("superlinearity_certificate: need >= 2 radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1]) || !(radii[0] > 0.0)) {
      throw config_error("superlinearity_certificate: radii must be positive increasing");
    }
  }
  SuperlinearityReport report;
  report.threshold = threshold;
  bool all_pass = !directions.empty();
  for (const auto& e : directions) {
    if (static_cast<int>(e.size()) != chern.dim()) {
      throw config_error("superlinearity_certificate: direction arity mismatch");
    }
    bool direction_unbounded = false;
    bool increasing = true;
    double prev_ratio = -kInf;
    double last_ratio = 0.0;
    for (double R : radii) {
      std::vector<double> u(e.size());
      for (std::size_t j = 0; j < e.size(); ++j) u[j] = R * e[j];
      const double h = chern.value(u);
      SuperlinearityRow row;
      row.direction = e;
      row.radius = R;
      row.ratio = h / R;
      row.unbounded = std::isinf(h);
      report.rows.push_back(row);
      if (std::isinf(h)) {
        direction_unbounded = true;
        break;  // h = +infinity from some radius on: superlinear outright
      }
      if (row.ratio < prev_ratio - 1e-12) increasing = false;
      prev_ratio = row.ratio;
      last_ratio = row.ratio;
    }
    const bool dir_pass = direction_unbounded || (increasing && last_ratio > threshold);
    all_pass = all_pass && dir_pass;
  }
  report.passes = all_pass;
  return report;
}

double certified_tv_radius(const ChernoffFunction& chern) {
  const double mean_norm = norm2(chern.mean());
  std::vector<std::vector<double>> directions;
  const int k = chern.dim();
  if (k == 1) {
    directions = {{1.0}, {-1.0}};
  } else {
    // Axis directions and the two main diagonals (documented heuristic).
    for (int j = 0; j < k; ++j) {
      std::vector<double> plus(static_cast<std::size_t>(k), 0.0), minus(static_cast<std::size_t>(k), 0.0);
      plus[static_cast<std::size_t>(j)] = 1.0;
      minus[static_cast<std::size_t>(j)] = -1.0;
      directions.push_back(plus);
      directions.push_back(minus);
    }
    const double inv = 1.0 / std::sqrt(static_cast<double>(k));
    directions.emplace_back(static_cast<std::size_t>(k), inv);
    directions.emplace_back(static_cast<std::size_t>(k), -inv);
  }
  for (double R = 1.0; R <= 1e18; R *= 2.0) {
    bool all = true;
    for (const auto& e : directions) {
      std::vector<double> u(e.size());
      for (std::size_t j = 0; j < e.size(); ++j) u[j] = R * e[j];
      const double h = chern.value(u);
      if (!(h >= R + mean_norm)) {  // +infinity qualifies
        all = false;
        break;
      }
    }
    if (all) return R;
  }
  throw model_error("certified_tv_radius: no radius certified up to 1e18");
}

}  // namespace cedf
