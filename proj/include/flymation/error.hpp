#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flymation {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant (non-finite number, bad color, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A text input could not be parsed. Carries the source name and 1-based line.
class ParseError : public ValidationError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message)
      : ValidationError(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line),
        message_(message) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string message_;
};

/// Filesystem or network failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed scene bundle. The kind distinguishes the failure class.
class BundleError : public Error {
 public:
  enum class Kind { version, truncated, out_of_bounds, malformed };

  BundleError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace flymation
