#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stepwise {

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (line-oriented readers report the 1-based line).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A configuration failed validation (degenerate group size, empty bank, ...).
class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

// An operation that requires at least one element received none.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// A numeric input was NaN or infinite where finite values are required.
class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

// Reward resolution was asked for a group that the all-wrong skip removed.
class GroupSkipped : public Error {
 public:
  using Error::Error;
};

// The embedding service could not be reached or returned garbage.
class EmbedderUnavailable : public Error {
 public:
  using Error::Error;
};

// The judge service could not be reached or returned garbage.
class JudgeUnavailable : public Error {
 public:
  using Error::Error;
};

// Baseline metrics that the score formula divides by were zero.
class BaselineDegenerate : public Error {
 public:
  using Error::Error;
};

}  // namespace stepwise
