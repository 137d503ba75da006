#pragma once

#include <stdexcept>
#include <string>

namespace fencenet {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shape or channel disagreement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Caller passed a value outside the accepted domain (label range, unknown fencer, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data is unusable: degenerate skeleton, missing joints, short video, bad manifest.
class DataError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf or a division by a vanishing norm.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A model, training or run configuration violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fencenet
