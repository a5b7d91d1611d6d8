#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netsel {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: out-of-range parameters, invalid configuration values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A query function cannot produce k unique nodes for this seed.
class InsufficientNodes : public Error {
 public:
  InsufficientNodes(std::size_t available, std::size_t requested)
      : Error("insufficient nodes: " + std::to_string(available) + " eligible, " +
              std::to_string(requested) + " requested"),
        available_(available),
        requested_(requested) {}
  std::size_t available() const noexcept { return available_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t available_;
  std::size_t requested_;
};

}  // namespace netsel
