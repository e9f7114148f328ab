#include "cedf/laplace.hpp"

#include <cmath>
#include <stdexcept>

#include "cedf/errors.hpp"
#include "cedf/quad.hpp"
#include "cedf/stats.hpp"

namespace cedf {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double coord_mean(const std::vector<double>& zpt) {
  double s = 0.0;
  for (double v : zpt) s += v;
  return s / static_cast<double>(zpt.size());
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0));
}

// Symmetric triangular density on [a, b].
struct Triangular {
  double a, b;
  double mid() const { return 0.5 * (a + b); }
  double halfwidth() const { return 0.5 * (b - a); }
  double density(double y) const {
    const double w = halfwidth();
    const double r = 1.0 - std::abs(y - mid()) / w;
    return r > 0.0 ? r / w : 0.0;
  }
};

// Integral of weight(y) * e^{t*y} * tri(y) dy over [a, b].
double tri_moment(const Triangular& tri, double t,
                  const std::function<double(double)>& weight) {
  const double bound = std::exp(std::max(t * tri.a, t * tri.b));
  const double tol = 1e-13 * std::max(1.0, bound);
  return quad::adaptive_simpson(
      [&](double y) { return weight(y) * std::exp(t * y) * tri.density(y); }, tri.a, tri.b, tol);
}

LaplaceTransform constant_transform(std::vector<double> y0) {
  LaplaceTransform L;
  L.dim = static_cast<int>(y0.size());
  L.name = "constant";
  L.mean = y0;
  L.eval = [y0](const std::vector<double>& t) { return std::exp(dot(t, y0)); };
  L.grad = [y0](const std::vector<double>& t) {
    const double v = std::exp(dot(t, y0));
    std::vector<double> g(y0.size());
    for (std::size_t j = 0; j < y0.size(); ++j) g[j] = y0[j] * v;
    return g;
  };
  L.hess = [y0](const std::vector<double>& t) {
    const double v = std::exp(dot(t, y0));
    const std::size_t k = y0.size();
    std::vector<double> h(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) h[i * k + j] = y0[i] * y0[j] * v;
    }
    return h;
  };
  return L;
}

LaplaceTransform gaussian_transform(std::vector<double> m, std::vector<double> sd) {
  LaplaceTransform L;
  L.dim = static_cast<int>(m.size());
  L.name = "gaussian";
  L.mean = m;
  auto logL = [m, sd](const std::vector<double>& t) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) s += t[j] * m[j] + 0.5 * sd[j] * sd[j] * t[j] * t[j];
    return s;
  };
  L.eval = [logL](const std::vector<double>& t) { return std::exp(logL(t)); };
  L.grad = [m, sd, logL](const std::vector<double>& t) {
    const double v = std::exp(logL(t));
    std::vector<double> g(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) g[j] = (m[j] + sd[j] * sd[j] * t[j]) * v;
    return g;
  };
  L.hess = [m, sd, logL](const std::vector<double>& t) {
    const double v = std::exp(logL(t));
    const std::size_t k = m.size();
    std::vector<double> h(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      const double gi = m[i] + sd[i] * sd[i] * t[i];
      for (std::size_t j = 0; j < k; ++j) {
        const double gj = m[j] + sd[j] * sd[j] * t[j];
        h[i * k + j] = (gi * gj + (i == j ? sd[i] * sd[i] : 0.0)) * v;
      }
    }
    return h;
  };
  return L;
}

LaplaceTransform bounded_transform(const std::vector<double>& lo, const std::vector<double>& hi) {
  std::vector<Triangular> tris;
  for (std::size_t j = 0; j < lo.size(); ++j) tris.push_back(Triangular{lo[j], hi[j]});
  LaplaceTransform L;
  L.dim = static_cast<int>(lo.size());
  L.name = "bounded";
  L.mean.resize(lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j) L.mean[j] = tris[j].mid();
  auto one = [](double) { return 1.0; };
  auto yw = [](double y) { return y; };
  auto y2w = [](double y) { return y * y; };
  L.eval = [tris, one](const std::vector<double>& t) {
    double v = 1.0;
    for (std::size_t j = 0; j < tris.size(); ++j) v *= tri_moment(tris[j], t[j], one);
    return v;
  };
  L.grad = [tris, one, yw](const std::vector<double>& t) {
    const std::size_t k = tris.size();
    std::vector<double> phi(k), dphi(k);
    for (std::size_t j = 0; j < k; ++j) {
      phi[j] = tri_moment(tris[j], t[j], one);
      dphi[j] = tri_moment(tris[j], t[j], yw);
    }
    double v = 1.0;
    for (double p : phi) v *= p;
    std::vector<double> g(k);
    for (std::size_t j = 0; j < k; ++j) g[j] = v * dphi[j] / phi[j];
    return g;
  };
  L.hess = [tris, one, yw, y2w](const std::vector<double>& t) {
    const std::size_t k = tris.size();
    std::vector<double> phi(k), dphi(k), ddphi(k);
    for (std::size_t j = 0; j < k; ++j) {
      phi[j] = tri_moment(tris[j], t[j], one);
      dphi[j] = tri_moment(tris[j], t[j], yw);
      ddphi[j] = tri_moment(tris[j], t[j], y2w);
    }
    double v = 1.0;
    for (double p : phi) v *= p;
    std::vector<double> h(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        h[i * k + j] = (i == j) ? v * ddphi[i] / phi[i]
                                : v * (dphi[i] / phi[i]) * (dphi[j] / phi[j]);
      }
    }
    return h;
  };
  return L;
}

LaplaceTransform folded_normal_transform(double m, double sd) {
  LaplaceTransform L;
  L.dim = 1;
  L.name = "folded-normal";
  const double a0 = m / sd;
  L.mean = {m * (2.0 * stats::normal_cdf(a0) - 1.0) + 2.0 * sd * normal_pdf(a0)};
  L.eval = [m, sd](const std::vector<double>& t) {
    const double tt = t[0];
    const double pre = std::exp(0.5 * sd * sd * tt * tt);
    const double A = m / sd + sd * tt;
    const double B = sd * tt - m / sd;
    return pre * (std::exp(tt * m) * stats::normal_cdf(A) + std::exp(-tt * m) * stats::normal_cdf(B));
  };
  L.grad = [m, sd](const std::vector<double>& t) {
    const double tt = t[0];
    const double A = m / sd + sd * tt;
    const double B = sd * tt - m / sd;
    const double e1 = std::exp(0.5 * sd * sd * tt * tt + tt * m);
    const double e2 = std::exp(0.5 * sd * sd * tt * tt - tt * m);
    const double d1 = (sd * sd * tt + m) * e1 * stats::normal_cdf(A) + e1 * normal_pdf(A) * sd;
    const double d2 = (sd * sd * tt - m) * e2 * stats::normal_cdf(B) + e2 * normal_pdf(B) * sd;
    return std::vector<double>{d1 + d2};
  };
  // hess left empty: consumers use finite differences of the closed-form
  // gradient, which is accurate enough for a 1-d Newton ascent.
  return L;
}

LaplaceTransform bounded_absolute_transform(double lo, double hi) {
  const Triangular tri{lo, hi};
  LaplaceTransform L;
  L.dim = 1;
  L.name = "bounded-absolute";
  auto absw = [](double y) { return std::abs(y); };
  auto abs2w = [](double y) { return y * y; };
  auto one = [](double) { return 1.0; };
  // Integrands use e^{t |y|}: split at 0 keeps the quadrature smooth.
  auto moment = [tri](double t, const std::function<double(double)>& w) {
    const double bound = std::exp(std::max(std::abs(t * tri.a), std::abs(t * tri.b)));
    const double tol = 1e-13 * std::max(1.0, bound);
    auto f = [&](double y) { return w(y) * std::exp(t * std::abs(y)) * tri.density(y); };
    if (tri.a < 0.0 && tri.b > 0.0) {
      return quad::adaptive_simpson(f, tri.a, 0.0, tol) + quad::adaptive_simpson(f, 0.0, tri.b, tol);
    }
    return quad::adaptive_simpson(f, tri.a, tri.b, tol);
  };
  L.mean = {moment(0.0, absw)};
  L.eval = [moment, one](const std::vector<double>& t) { return moment(t[0], one); };
  L.grad = [moment, absw](const std::vector<double>& t) {
    return std::vector<double>{moment(t[0], absw)};
  };
  L.hess = [moment, abs2w](const std::vector<double>& t) {
    return std::vector<double>{moment(t[0], abs2w)};
  };
  return L;
}

}  // namespace

LaplaceTransform laplace_transform(const ModelSpec& model) {
  model.validate();
  switch (model.family) {
    case Family::ConstantY:
      return constant_transform(model.y0);
    case Family::SemiParametric: {
      const double zbar = coord_mean(model.z);
      std::vector<double> m(static_cast<std::size_t>(model.k));
      for (int j = 0; j < model.k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        m[sj] = model.mean_base[sj] + model.mean_slope[sj] * zbar;
      }
      return gaussian_transform(std::move(m), model.sd);
    }
    case Family::BoundedY:
      return bounded_transform(model.y_lo, model.y_hi);
  }
  throw config_error("laplace_transform: unknown family");
}

LaplaceTransform absolute_laplace_transform(const ModelSpec& model) {
  model.validate();
  switch (model.family) {
    case Family::ConstantY:
      return constant_transform({norm2(model.y0)});
    case Family::SemiParametric: {
      if (model.k != 1) {
        throw model_error("absolute_laplace_transform: Gaussian family shipped for k = 1 only");
      }
      const double zbar = coord_mean(model.z);
      return folded_normal_transform(model.mean_base[0] + model.mean_slope[0] * zbar, model.sd[0]);
    }
    case Family::BoundedY:
      if (model.k != 1) {
        throw model_error("absolute_laplace_transform: bounded family shipped for k = 1 only");
      }
      return bounded_absolute_transform(model.y_lo[0], model.y_hi[0]);
  }
  throw config_error("absolute_laplace_transform: unknown family");
}

}  // namespace cedf
