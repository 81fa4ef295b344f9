#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sunny {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed ARFF input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Closed gap requested where the SBS is no worse than the VBS.
class UndefinedBaselineError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sunny
