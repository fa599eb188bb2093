#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brox {

/// A point or value fell outside the domain a table was built on.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument validation failed (ordering a < b < c, non-positive step, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulated path used up its step budget before the stop rule fired.
class HorizonExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by run_replicated when any replicate throws; carries its index.
class ReplicateError : public std::runtime_error {
 public:
  ReplicateError(std::size_t index, const std::string& what)
      : std::runtime_error("replicate " + std::to_string(index) + ": " + what),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace brox
