#pragma once

#include <stdexcept>
#include <string>

namespace egotergm {

// Exception hierarchy. The CLI maps each family onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// Bad run configuration, malformed term strings, unsupported options.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class UnsupportedFeature : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Input data violating the file schemas or the network invariants.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Non-identifiable models, failed fits, degenerate bootstrap inputs.
class EstimationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace egotergm
