#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cedf/model.hpp"

namespace cedf {

// Moment generating function L(t) = E exp(<t, Y>) of the conditional law of
// Y at the model's center z (the local-conditions limit object, which for
// the shipped families equals the conditional MGF at z exactly).
//
// eval/grad are always present; hess (row-major k x k) may be an empty
// function, in which case consumers fall back to finite differences of grad.
struct LaplaceTransform {
  int dim = 1;
  std::string name;
  std::vector<double> mean;  // grad L(0) = E Y
  std::function<double(const std::vector<double>&)> eval;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
  std::function<std::vector<double>(const std::vector<double>&)> hess;
};

// L_Y for the model's conditional law at z. Constant and Gaussian families
// are closed-form; the bounded family integrates e^{t y} against the
// declared triangular conditional density by adaptive quadrature.
LaplaceTransform laplace_transform(const ModelSpec& model);

// L_{|Y|_k} for the Euclidean norm of Y (scalar argument). Shipped for
// constant Y (any k, the norm is deterministic), and for k = 1 Gaussian
// (folded-normal closed form) and k = 1 bounded (quadrature). Other
// combinations raise model_error; nothing in the toolkit needs them.
LaplaceTransform absolute_laplace_transform(const ModelSpec& model);

}  // namespace cedf
