#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtmprod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad q, k out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `position()` is a 0-based offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A product failed a convergence precondition.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: requested accuracy unreachable, or a term that is
/// not a positive real where one is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace gtmprod
