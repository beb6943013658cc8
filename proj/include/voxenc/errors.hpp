#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voxenc {

/// Bad input data, malformed files, or violated preconditions. The CLI maps
/// this family to exit code 2; anything else that escapes is a computation
/// failure (exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text-format parse failure carrying the 1-based physical line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Binary-format failure with a machine-checkable reason.
class FormatError : public InputError {
 public:
  enum class Reason {
    bad_magic,
    bad_version,
    truncated,
    trailing_bytes,
    non_finite,
    invalid_header,
  };

  FormatError(Reason reason, const std::string& what)
      : InputError(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace voxenc
