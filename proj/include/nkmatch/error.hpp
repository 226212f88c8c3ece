#pragma once

#include <stdexcept>
#include <string>

namespace nkmatch {

/// Caller supplied an invalid parameter or option value.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data (files, graphs, seed lists) cannot be used as given.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nkmatch
