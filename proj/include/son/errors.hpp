#pragma once

#include <stdexcept>
#include <string>

namespace son {

// Argument violates an operation's precondition (wrong dimension, non-finite
// entries, zero example vector, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Learner or sketch constructed with parameters outside their valid range.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization the algorithm relies on became singular or lost rank.
class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  /// inner's message prefixed with "source: ".
  ParseError(const std::string& source, const ParseError& inner)
      : std::runtime_error(source + ": " + inner.what()), line_(inner.line()) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace son
