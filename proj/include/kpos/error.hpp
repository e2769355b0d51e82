#pragma once

#include <stdexcept>
#include <string>

namespace kpos {

// Representation cannot carry the requested system (repeated or complex
// poles handed to a partial-fraction routine, for example).
class UnsupportedRepresentation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The system is outside the structural class an operation assumes.
class StructuralError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An enumeration would exceed its configured budget.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace kpos
