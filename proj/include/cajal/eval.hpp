#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cajal/ast.hpp"

namespace cajal {

/// Upper bound on evaluation-rule applications.
struct EvalBudget {
  std::uint64_t max_steps = 1'000'000;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { BudgetExceeded, StuckTerm };
  EvalError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Capture-avoiding substitution of the closed value `v` for free `name`.
Expr subst(const Expr& e, std::string_view name, const Expr& v);

struct EvalResult {
  Expr value;
  std::uint64_t steps = 0;
};

/// Big-step call-by-value evaluation of a closed expression.
EvalResult eval_counted(const Expr& e, EvalBudget budget = {});

inline Expr eval(const Expr& e, EvalBudget budget = {}) { return eval_counted(e, budget).value; }

}  // namespace cajal
