#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace disclab {

/// Base class for every error the toolkit raises. Carries the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(what, 2) {}
};

// Raised by exhaustive oracles when the instance is over the enumeration cap.
class RefusalError : public ParameterError {
 public:
  explicit RefusalError(const std::string& what) : ParameterError(what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what, 3) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what, 4) {}
};

class ParseError : public IoError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace disclab
