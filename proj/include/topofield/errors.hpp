#pragma once

#include <stdexcept>
#include <string>

namespace topofield {

// Invalid argument / configuration supplied by the caller.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Linear system could not be factorized (insufficient supports etc.).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Computation produced non-finite values or failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topofield
