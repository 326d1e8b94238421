#pragma once

#include <stdexcept>
#include <string>

namespace policybound {

// Base class for all library errors. Commands map these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input rows do not form a complete unit x time grid.
class BalanceError : public Error {
 public:
  using Error::Error;
};

// Header, column type, or treatment-code problems in the input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// The same (unit, time) cell appears more than once.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

// An argument is outside the domain of the operation (e.g. t = 1 for a
// first difference).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A comparator pool came out empty; callers may widen the filter.
class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

// The regression design is rank deficient.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

// A residual-based rule was asked for but no pre-period residuals exist.
class InsufficientPrePeriodError : public Error {
 public:
  using Error::Error;
};

// A coarsening strategy references an unobserved treatment version.
class StrategyError : public Error {
 public:
  using Error::Error;
};

// A regression subset lacks the units needed for the requested quantity.
class DegenerateSubsetError : public Error {
 public:
  using Error::Error;
};

}  // namespace policybound
