#pragma once

#include <stdexcept>
#include <string>

namespace topicmine {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input, malformed records, duplicate ids.
class CorpusError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration or out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands whose shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a model's contract (negative or non-integer
/// counts, empty rows).
class InputError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered, or a factorization that cannot proceed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace topicmine
