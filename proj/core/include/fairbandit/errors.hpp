#pragma once

#include <stdexcept>
#include <string>

namespace fairbandit {

/// Base class for every error raised by the library. Argument errors use
/// std::invalid_argument directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation requires a nonempty fairness polytope.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Raised by combinatorial routines when the input exceeds their size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Raised by the configuration parser. `field()` names the offending key
/// path, e.g. "environment.means[1][0]".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace fairbandit
