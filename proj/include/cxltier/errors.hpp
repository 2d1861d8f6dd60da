#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cxltier {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's domain.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Operation is not valid in the current state (duplicate id, wrong tier, ...).
class StateError : public Error {
public:
  using Error::Error;
};

class NotFoundError : public Error {
public:
  using Error::Error;
};

/// The compressed tier cannot hold the request even after compaction.
class CapacityExhausted : public Error {
public:
  using Error::Error;
};

/// Line-granular access to a page stored as a whole compressed block.
class UnsupportedGranularity : public Error {
public:
  using Error::Error;
};

/// Malformed encoded data. `offset()` is the byte position in the input where
/// decoding stopped.
class FormatError : public Error {
public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Text input (config, trace) failed to parse. `line()` is 1-based, 0 if unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace cxltier
