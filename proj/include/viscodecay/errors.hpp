#pragma once

#include <stdexcept>
#include <string>

namespace viscodecay {

/// Raised when a caller hands an operation data that violates its precondition.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative method fails or a non-finite value appears.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace viscodecay
