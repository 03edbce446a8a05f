#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace folin {

/// Bad user input: malformed files, inconsistent dimensions, violated preconditions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression text that does not match the grammar.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : InputError(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the domain of the field (division by zero, log of a non-positive value, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical algorithm failed to deliver (no bracket, iteration cap, unobservable pair, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace folin
