#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpatch {

// Malformed input text or a value that violates a structural invariant.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : InputError("line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// An algorithm was invoked outside the class of inputs it is defined for
// (not parity-definite, not quasi-propositional, wrong revision policy).
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, std::vector<std::string> witness = {})
      : std::runtime_error(what), witness_(std::move(witness)) {}

  const std::vector<std::string>& witness() const { return witness_; }

 private:
  std::vector<std::string> witness_;
};

// An exhaustive oracle was asked to enumerate more than its budget allows.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tpatch
