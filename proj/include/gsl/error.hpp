#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsl {

// Syntax errors in formulas carry the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Invalid model, objectives or strategy documents.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A formula that is well-formed but cannot be checked (infinite grades).
class UnsupportedGrade : public std::runtime_error {
 public:
  UnsupportedGrade() : std::runtime_error("infinite grades unsupported") {}
};

// A construction exceeded its configured state budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on library calls (alphabet mismatch, wrong shape, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gsl
