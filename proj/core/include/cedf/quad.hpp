#pragma once

#include <functional>

namespace cedf::quad {

// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
// Recursion depth is capped; integrable endpoint spikes are handled by the
// usual interval-halving error estimate (|S_left + S_right - S| / 15).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

// Fixed composite Simpson rule with n subintervals (n rounded up to even).
// Deterministic and cheap; used where a fixed grid is part of the contract.
double composite_simpson(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace cedf::quad
