#pragma once

#include <stdexcept>
#include <string>

namespace rssdgeo {

/// Bad argument to a library call (dimension mismatch, out-of-range value).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix expected to be positive semidefinite has a clearly negative
/// eigenvalue.
class NotPsdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario file could not be parsed or violates an invariant. `path` names
/// the offending field (e.g. "sensors[3].sigma"), empty for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace rssdgeo
