#pragma once

#include <stdexcept>
#include <string>

namespace figkd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Preconditions violated by a caller (bad shapes, out-of-range labels, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: unknown keys, unparsable values, invalid field ranges.
// The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (CSV rows, checkpoints, reports).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A parameter update produced NaN/Inf. The CLI maps this to exit code 3.
class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

}  // namespace figkd
