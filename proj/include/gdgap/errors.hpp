#pragma once

#include <stdexcept>
#include <string>

namespace gdgap {

/// Parameters violate a construction's inequality constraints. The message
/// names the violated inequality. Maps to CLI exit code 2.
class InfeasibleParams : public std::runtime_error {
 public:
  explicit InfeasibleParams(const std::string& what)
      : std::runtime_error("infeasible parameters: " + what) {}
};

/// A closed-form trajectory was requested outside the regime where it is
/// proven (e.g. K > 3/(4 eta^2)).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// A runtime verification of a structural claim failed.
class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdgap
