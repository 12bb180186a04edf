#pragma once

#include <stdexcept>
#include <string>

namespace dispersal {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a documented precondition (bad sizes, beta below the
// row-sum bound, epsilon out of range, malformed arguments).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Config file problems: unknown keys, unparsable values, missing sections.
// Messages carry "path:line" where a location is known.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A kernel or nonlinearity audit failed: asymmetric or negative kernel
// entries, disconnected positivity graph, growth hypotheses not satisfied.
// The command line maps this to its own exit code.
class AuditError : public Error {
 public:
  using Error::Error;
};

// An iterative method ran out of its iteration budget.
class IterationError : public Error {
 public:
  using Error::Error;
};

// The monotone scheme produced an iterate that moved the wrong way, which
// signals that the shift beta is below the steepest slope of f on the
// bracket, or that the bracket itself is invalid.
class MonotonicityError : public IterationError {
 public:
  using IterationError::IterationError;
};

// Threshold bracketing found no solvable t after the configured number of
// downward doublings.
class ThresholdDegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace dispersal
