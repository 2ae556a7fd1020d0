#pragma once

#include <stdexcept>
#include <string>

namespace trinorm {

// Bad argument values (out-of-range vertex, p outside (0,1), empty input).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of a bound evaluator does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds a supported size ceiling (exact enumeration, pattern span).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Non-finite intermediate or result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trinorm
