#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace branchgrp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `position` is a 0-based offset (or token index,
/// whichever the caller documents).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An operation would materialize more vertices/elements than its cap allows.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operands live on trees (or alphabets) of different levels.
class LevelMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace branchgrp
