#pragma once

#include <stdexcept>
#include <string>

namespace bihartree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter tuple or configuration value violates its invariants.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request is outside the regime where the quantity is defined
/// (e.g. x_alpha for N <= 4, thresholds outside 0 < s_c < 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative or time-stepping numerics failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File, format or persistence failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bihartree
