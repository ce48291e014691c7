#ifndef BALTOR_ERRORS_H_
#define BALTOR_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace baltor {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid sizes, out-of-range parameters, dimension mismatches.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// External score file does not match the dataset it is aligned to.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Tie parameter cannot be estimated (every pair is tied).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Selective risk requested for a selector with zero coverage.
class UndefinedRiskError : public Error {
 public:
  using Error::Error;
};

// Exhaustive oracle asked to enumerate a world that is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace baltor

#endif  // BALTOR_ERRORS_H_
