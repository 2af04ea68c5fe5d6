#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgae {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (edge lists, alignment files, configs).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Incompatible dimensions between two operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Corrupt, truncated or version-mismatched binary files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf, non-convergence, ill-conditioning.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not satisfiable for the given input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace tgae
