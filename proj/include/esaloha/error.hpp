#pragma once

#include <stdexcept>
#include <string>

namespace esaloha {

/// Invalid configuration, flags or dimensions. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A search that would exceed its size guard (exponential enumeration).
class GuardError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// An iterative solver that did not converge. Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Unreadable input or unwritable output. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esaloha
