#pragma once

#include <stdexcept>
#include <string>

namespace netembed {

// Parameter violations (bad dimensions, nonpositive radii, mismatched sizes)
// are reported as std::invalid_argument.

// Inputs that are structurally valid but carry no usable information:
// single-point clouds, all-zero observations, zero vectors under
// renormalization.
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or vanishing iterates inside a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config parse or validation failure; message carries line/field diagnostics.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace netembed
