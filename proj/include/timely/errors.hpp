#pragma once

#include <stdexcept>
#include <string>

namespace timely {

// Thrown when a solver would exceed its configured enumeration or memory
// budget.  Callers that can fall back to a cheaper mode catch this; the CLI
// maps it to a dedicated exit code.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numerical routine cannot certify its result (degenerate
// pivot, singular stationary system).  Never downgraded to a warning: a
// caller sees either a certified value or this.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace timely
