#pragma once

#include <stdexcept>
#include <string>

namespace lipgrad {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point was requested outside the search box.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The objective produced a non-finite value or gradient.
class EvaluationError : public Error {
public:
  using Error::Error;
};

/// Ternary subdivision went deeper than the configured cap.
class DepthOverflowError : public Error {
public:
  using Error::Error;
};

/// Internal bookkeeping disagrees with itself.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// A precondition of an internal routine was violated.
class ContractError : public Error {
public:
  using Error::Error;
};

class UnknownIntervalError : public Error {
public:
  using Error::Error;
};

/// Invalid user configuration (solver parameters, CLI input, class parameters).
class ConfigError : public Error {
public:
  using Error::Error;
};

class GenerationError : public Error {
public:
  using Error::Error;
};

/// Raised by a budgeted evaluator once the trial budget is spent.
class BudgetExhausted : public Error {
public:
  using Error::Error;
};

}  // namespace lipgrad
