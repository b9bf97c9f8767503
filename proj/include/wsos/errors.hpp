#pragma once

#include <stdexcept>

namespace wsos {

/// Precondition violated by the caller: mismatched variable tables, bad sizes,
/// malformed input strings.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A floating-point routine met non-finite data or did not converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem size exceeded a configured guard.
class GuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace wsos
