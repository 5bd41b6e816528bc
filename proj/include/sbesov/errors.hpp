#pragma once

#include <stdexcept>
#include <string>

namespace sbesov {

/// Invalid input to an operation (out-of-range order, p <= d, negative time, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method ran out of its budget. The message carries diagnostics.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The discretization cannot faithfully represent the request (unresolved kernel
/// tail, aliased nonlinearity, bump narrower than the grid). Refused, not approximated.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbesov
