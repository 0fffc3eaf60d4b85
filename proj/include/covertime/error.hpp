#pragma once

#include <stdexcept>
#include <string>

namespace covertime {

// Bad input: parameters, network files, sweep configs. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation declined to produce a number (size caps, infinite moments,
// failed brackets). CLI exit code 2.
class NumericRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covertime
