#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace motion_barcode {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the offending path and 1-based line (0 when
/// the problem is not tied to a line).
class FormatError : public Error {
 public:
  FormatError(std::string path, std::size_t line, const std::string& message)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// Arguments violate an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace motion_barcode
