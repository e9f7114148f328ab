#include "cedf/quad.hpp"

#include <cmath>
#include <stdexcept>

namespace cedf::quad {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: need a <= b");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  return adapt(f, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, max_depth);
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (!(a <= b)) throw std::invalid_argument("composite_simpson: need a <= b");
  if (a == b) return 0.0;
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return sum * h / 3.0;
}

}  // namespace cedf::quad
