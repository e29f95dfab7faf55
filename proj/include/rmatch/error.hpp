#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmatch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed graph file; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// No matching of A_r into B exists; r is the first failing prefix size.
class NoMatching : public Error {
 public:
  explicit NoMatching(std::size_t r)
      : Error("no matching of A_" + std::to_string(r) + " into B"), r_(r) {}
  std::size_t r() const { return r_; }

 private:
  std::size_t r_;
};

class NoPerfectMatching : public Error {
 public:
  NoPerfectMatching() : Error("graph has no perfect matching") {}
};

class OddVertexCount : public Error {
 public:
  explicit OddVertexCount(std::size_t n)
      : Error("perfect matching needs an even vertex count, got " +
              std::to_string(n)) {}
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// A negative alternating cycle was found, so the supplied matching is not
// optimal.
class OptimalityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace rmatch
