#pragma once

#include <stdexcept>
#include <string>

namespace memsim {

/// Raised when an input violates a type invariant or a precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for unreadable, truncated or malformed files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace memsim
