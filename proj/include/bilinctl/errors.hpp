#pragma once

#include <stdexcept>
#include <string>

namespace bilinctl {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (shape, zero state, bad
/// document, unknown name, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A computation produced non-finite values or otherwise broke down.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace bilinctl
