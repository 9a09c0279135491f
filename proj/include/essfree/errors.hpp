#pragma once

#include <stdexcept>
#include <string>

namespace essfree {

// Raised when a computation hits one of its configured caps (closure nodes,
// section-word length, level, element count).
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::string budget, const std::string& what)
      : std::runtime_error(what), budget_(std::move(budget)) {}

  const std::string& budget() const noexcept { return budget_; }

 private:
  std::string budget_;
};

// An invariant the library relies on did not hold. Never expected in a
// correct run; callers should abort with diagnostics.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace essfree
