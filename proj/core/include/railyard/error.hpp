#pragma once

#include <stdexcept>
#include <string>

namespace railyard {

// Raised for inputs that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine fails to reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace railyard
