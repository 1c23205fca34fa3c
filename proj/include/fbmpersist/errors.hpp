#pragma once

#include <stdexcept>
#include <string>

namespace fbmpersist {

/// Bad arguments or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Covariance factorization failed even after jitter escalation (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point set grew beyond the configured cap (exit code 4).
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbmpersist
