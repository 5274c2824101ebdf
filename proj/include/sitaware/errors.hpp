#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sitaware {

// Syntax-level failure in an input file; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Well-formed input that does not match the expected layout (header, keys, shape of a file).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invariant violations found in otherwise parseable data.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& violations) {
    if (violations.empty()) return "validation failed";
    std::string out = violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) {
      out += "; ";
      out += violations[i];
    }
    return out;
  }
  std::vector<std::string> violations_;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Companion inputs that do not belong together (e.g. a pooling result paired
// with a different estimate list).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient while training; step is the 1-based step index.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& message, long step)
      : std::runtime_error(message + " at step " + std::to_string(step)), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

// Missing or unreadable file; the CLI maps this to exit code 2.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sitaware
