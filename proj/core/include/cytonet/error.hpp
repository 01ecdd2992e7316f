#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cytonet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite value.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string species, double time);

  const std::string& species() const noexcept { return species_; }
  double time() const noexcept { return time_; }

 private:
  std::string species_;
  double time_;
};

/// Input data (spec, event, scenario) violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace cytonet
