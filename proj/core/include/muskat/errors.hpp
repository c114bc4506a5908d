#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

// Base of every error raised by the library. The CLI maps subclasses to exit
// codes (validation 2, monitor breach 3, numerical failure 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: config values, parameter ranges, malformed files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain of validity (e.g. the interface
// touches a rigid boundary).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Multiplier with m(-k) != conj(m(k)) applied to a real field.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// Stability hypotheses (Rayleigh-Taylor sign, separation from the walls)
// no longer hold.
class MonitorBreach : public Error {
 public:
  using Error::Error;
};

// Time step underflow, non-finite state and similar blow-ups.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace muskat
