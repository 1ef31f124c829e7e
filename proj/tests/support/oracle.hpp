#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cajal/typecheck.hpp"

namespace cajal::oracle {

/// Every type τ with ctx |- e : τ derivable by trying all splits of every
/// rule. Independent of the algorithmic checker.
std::vector<Ty> declarative_types(const Ctx& ctx, const Expr& e);

struct EnumConfig {
  std::size_t max_depth = 4;
  std::size_t max_size = 7;
  std::vector<Ty> annotations{Ty::boolean(), Ty::nat(), Ty::fn(Ty::boolean(), Ty::boolean())};
};

/// Calls `visit` on every expression within the bounds whose free variables
/// come from `ctx`. Leaves are tt, ff, 0, context names and binders in scope.
void enumerate(const Ctx& ctx, const EnumConfig& cfg, const std::function<void(const Expr&)>& visit);

/// The context shapes used by the equivalence check: the empty context and
/// every context of one or two variables over Bool, Nat and Bool -o Bool.
std::vector<Ctx> small_contexts();

}  // namespace cajal::oracle
