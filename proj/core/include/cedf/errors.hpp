#pragma once

#include <stdexcept>
#include <string>

namespace cedf {

// User-supplied configuration is invalid (bad keys, out-of-range parameters,
// inconsistent sections). The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// A model evaluation failed (non-finite transform value, unusable family
// parameters at runtime). The CLI maps this to exit code 3.
class model_error : public std::runtime_error {
 public:
  explicit model_error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace cedf
