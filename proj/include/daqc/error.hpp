#pragma once

#include <stdexcept>
#include <string>

namespace daqc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (bad JSON, unknown algorithm, out-of-range N).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The compiler could not produce a valid schedule (singular sign matrix,
/// negative bDAQC block time, incompatible protocol).
class CompileError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: dimension cap, non-convergence, loss of unitarity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace daqc
