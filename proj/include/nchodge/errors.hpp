#pragma once

#include <stdexcept>
#include <string>

namespace nchodge {

/// Bad or unsupported user input (schema, invariance, insufficient truncation).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation needs chain data outside the window that was built.
class IncompleteWindow : public InputError {
 public:
  using InputError::InputError;
};

/// An operation declines to produce a result (e.g. Hodge table without degeneration).
class Refused : public InputError {
 public:
  using InputError::InputError;
};

/// A mathematical identity that must hold by construction failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nchodge
