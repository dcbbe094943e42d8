#pragma once

#include <stdexcept>
#include <string>

namespace opalg {

/// Input violated a documented precondition or schema (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed its own contract: non-convergent eigensolve,
/// conditioning breach, rank-decision ambiguity (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opalg
