#pragma once

#include <stdexcept>
#include <string>

namespace sharpot {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-contract input (bad dimensions, negative mass,
/// sum-to-one violations, invalid parameters).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its iteration budget. Carries the last
/// residual so callers can decide whether the partial result is usable.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Linear-domain scaling overflowed or underflowed to the point of producing
/// non-finite values; the log-domain solver handles these instances.
class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

/// A linear system arising from a boundary (non-interior) instance is
/// numerically singular.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

/// Instance exceeds the size contract of the exact oracle.
class OutOfScale : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sharpot
