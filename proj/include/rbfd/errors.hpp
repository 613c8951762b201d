#pragma once

#include <stdexcept>
#include <string>

namespace rbfd {

/// Operand dimensions do not agree (target vs. model, sample vs. matrix, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every restart of a batch produced non-finite values.
class AllRunsDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rbfd
