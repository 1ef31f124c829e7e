#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cajal/ast.hpp"

namespace cajal {

enum class Rule { Var, True, False, Zero, Succ, Lam, App, If, Iter };

inline constexpr int kRuleCount = 9;
const char* rule_name(Rule r);

/// A linear typing derivation. `split` lists the sub-contexts handed to the
/// children of App ([fun, arg]), If ([cond, branches]) and Iter
/// ([base, step-without-binder, count]); it is empty for the other rules.
struct Derivation {
  Ctx ctx;
  Expr expr;
  Ty type = Ty::boolean();
  Rule rule = Rule::True;
  std::vector<Derivation> children;
  std::vector<Ctx> split;
};

class TypeError : public std::runtime_error {
 public:
  enum class Kind {
    UnboundVariable,
    NonlinearUse,
    UnusedVariable,
    Mismatch,
    BranchContextMismatch,
    CountNotNat,
    NotAFunction,
  };

  TypeError(Kind kind, std::string message, SourcePos pos, std::string name = {},
            std::size_t count = 0)
      : std::runtime_error(std::move(message)),
        kind_(kind),
        pos_(pos),
        name_(std::move(name)),
        count_(count) {}

  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::string& name() const { return name_; }
  std::size_t count() const { return count_; }

 private:
  Kind kind_;
  SourcePos pos_;
  std::string name_;
  std::size_t count_;
};

const char* error_kind_name(TypeError::Kind k);

/// True iff the parts have pairwise disjoint names and together hold exactly
/// the binders of `parent`.
bool split_ok(const Ctx& parent, std::span<const Ctx> parts);

/// Algorithmic linear typechecking. Splits are reconstructed from the free
/// variables each subterm uses, so the result is deterministic. Throws
/// TypeError when no derivation exists.
Derivation typecheck(const Ctx& ctx, const Expr& e);
/// Same judgment, with the error returned instead of thrown.
std::variant<Derivation, TypeError> try_typecheck(const Ctx& ctx, const Expr& e);

/// Replays every node of `d` against the declarative rules.
bool validate(const Derivation& d);

/// Indented, one node per line.
std::string render(const Derivation& d);

/// Number of nodes using each rule, indexed by Rule.
std::vector<std::size_t> rule_histogram(const Derivation& d);

}  // namespace cajal
