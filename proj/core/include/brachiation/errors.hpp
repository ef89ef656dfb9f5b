#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brachiation {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loss of control authority or a non-invertible inertia matrix.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Operation needs a cable attachment that is not set.
class AttachmentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A configuration value violates a type invariant. `key()` names it.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace brachiation
