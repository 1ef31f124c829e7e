#include "cajal/typecheck.hpp"

#include <map>
#include <set>
#include <sstream>

#include "cajal/parser.hpp"

namespace cajal {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Var: return "Var";
    case Rule::True: return "True";
    case Rule::False: return "False";
    case Rule::Zero: return "Zero";
    case Rule::Succ: return "Succ";
    case Rule::Lam: return "Lam";
    case Rule::App: return "App";
    case Rule::If: return "If";
    case Rule::Iter: return "Iter";
  }
  return "?";
}

const char* error_kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::NonlinearUse: return "NonlinearUse";
    case TypeError::Kind::UnusedVariable: return "UnusedVariable";
    case TypeError::Kind::Mismatch: return "Mismatch";
    case TypeError::Kind::BranchContextMismatch: return "BranchContextMismatch";
    case TypeError::Kind::CountNotNat: return "CountNotNat";
    case TypeError::Kind::NotAFunction: return "NotAFunction";
  }
  return "?";
}

bool split_ok(const Ctx& parent, std::span<const Ctx> parts) {
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const Ctx& part : parts) {
    for (const Binding& b : part.binders()) {
      if (!seen.insert(b.name).second) return false;
      const Ty* t = parent.lookup(b.name);
      if (t == nullptr || !(*t == b.type)) return false;
    }
    total += part.length();
  }
  return total == parent.length();
}

namespace {

using Usage = std::map<std::string, std::size_t>;

struct Inferred {
  Expr expr;
  Ty type;
  Rule rule;
  Usage usage;
  std::vector<Inferred> kids;
};

std::set<std::string> keys(const Usage& u) {
  std::set<std::string> out;
  for (const auto& [k, v] : u) out.insert(k);
  return out;
}

TypeError nonlinear(const std::string& name, std::size_t count, SourcePos pos) {
  return TypeError(TypeError::Kind::NonlinearUse,
                   "variable '" + name + "' used " + std::to_string(count) +
                       " times; linear variables must be used exactly once",
                   pos, name, count);
}

TypeError unused(const std::string& name, SourcePos pos) {
  return TypeError(TypeError::Kind::UnusedVariable,
                   "variable '" + name + "' is never used; linear variables cannot be discarded",
                   pos, name, 0);
}

TypeError mismatch(const Ty& expected, const Ty& found, SourcePos pos, const std::string& where) {
  return TypeError(TypeError::Kind::Mismatch,
                   where + ": expected " + to_string(expected) + ", found " + to_string(found),
                   pos);
}

// Errors are returned rather than thrown so that bulk checking of rejected
// programs stays cheap.
class Checker {
 public:
  explicit Checker(const Ctx& ctx) {
    for (const auto& b : ctx.binders()) scope_.insert_or_assign(b.name, b.type);
  }

  std::optional<TypeError> error;

  std::optional<Inferred> infer(const Expr& e) {
    const SourcePos pos = e.pos();
    if (const auto* v = e.as<Var>()) {
      auto it = scope_.find(v->name);
      if (it == scope_.end())
        return fail(TypeError(TypeError::Kind::UnboundVariable,
                              "unbound variable '" + v->name + "'", pos, v->name));
      return Inferred{e, it->second, Rule::Var, Usage{{v->name, 1}}, {}};
    }
    if (e.is<True>()) return Inferred{e, Ty::boolean(), Rule::True, {}, {}};
    if (e.is<False>()) return Inferred{e, Ty::boolean(), Rule::False, {}, {}};
    if (e.is<Zero>()) return Inferred{e, Ty::nat(), Rule::Zero, {}, {}};
    if (const auto* s = e.as<Succ>()) {
      auto body = infer(s->body);
      if (!body) return {};
      if (!(body->type == Ty::nat())) return fail(mismatch(Ty::nat(), body->type, s->body.pos(), "succ"));
      Usage u = body->usage;
      return Inferred{e, Ty::nat(), Rule::Succ, std::move(u), {std::move(*body)}};
    }
    if (const auto* l = e.as<Lam>()) {
      auto body = with_binder(l->binder, l->annotation, [&] { return infer(l->body); });
      if (!body) return {};
      Usage u = body->usage;
      auto it = u.find(l->binder);
      if (it == u.end()) return fail(unused(l->binder, pos));
      u.erase(it);
      Ty t = Ty::fn(l->annotation, body->type);
      return Inferred{e, t, Rule::Lam, std::move(u), {std::move(*body)}};
    }
    if (const auto* a = e.as<App>()) {
      auto fun = infer(a->fun);
      if (!fun) return {};
      auto arg = infer(a->arg);
      if (!arg) return {};
      if (!fun->type.is_fn())
        return fail(TypeError(TypeError::Kind::NotAFunction,
                              "applying a non-function of type " + to_string(fun->type),
                              a->fun.pos()));
      if (!(fun->type.domain() == arg->type))
        return fail(mismatch(fun->type.domain(), arg->type, a->arg.pos(), "argument"));
      Usage u = fun->usage;
      if (!merge_into(u, arg->usage, pos)) return {};
      Ty t = fun->type.codomain();
      return Inferred{e, t, Rule::App, std::move(u), {std::move(*fun), std::move(*arg)}};
    }
    if (const auto* i = e.as<If>()) {
      auto c = infer(i->cond);
      if (!c) return {};
      auto t = infer(i->then_branch);
      if (!t) return {};
      auto f = infer(i->else_branch);
      if (!f) return {};
      if (!(c->type == Ty::boolean()))
        return fail(mismatch(Ty::boolean(), c->type, i->cond.pos(), "condition"));
      if (!(t->type == f->type))
        return fail(mismatch(t->type, f->type, i->else_branch.pos(), "else branch"));
      // Branches share one context, so a variable used by both counts once.
      Usage branches = t->usage;
      for (const auto& [k, v] : f->usage) branches[k] = std::max(branches[k], v);
      Usage u = c->usage;
      if (!merge_into(u, branches, pos)) return {};
      if (keys(t->usage) != keys(f->usage)) {
        std::string diff;
        for (const auto& k : keys(branches))
          if (t->usage.contains(k) != f->usage.contains(k)) diff += (diff.empty() ? "" : ", ") + k;
        return fail(TypeError(TypeError::Kind::BranchContextMismatch,
                              "branches of a conditional must use the same variables (differ on " +
                                  diff + ")",
                              pos, diff));
      }
      Ty ty = t->type;
      return Inferred{e, ty, Rule::If, std::move(u), {std::move(*c), std::move(*t), std::move(*f)}};
    }
    const auto* it = e.as<Iter>();
    auto base = infer(it->base);
    if (!base) return {};
    auto step = with_binder(it->binder, base->type, [&] { return infer(it->step); });
    if (!step) return {};
    auto count = infer(it->count);
    if (!count) return {};
    if (!(count->type == Ty::nat()))
      return fail(TypeError(TypeError::Kind::CountNotNat,
                            "iteration count must be Nat, found " + to_string(count->type),
                            it->count.pos()));
    if (!(step->type == base->type))
      return fail(mismatch(base->type, step->type, it->step.pos(), "iterator step"));
    Usage step_free = step->usage;
    auto found = step_free.find(it->binder);
    if (found == step_free.end()) return fail(unused(it->binder, it->step.pos()));
    step_free.erase(found);
    Usage u = base->usage;
    if (!merge_into(u, step_free, pos) || !merge_into(u, count->usage, pos)) return {};
    Ty ty = base->type;
    return Inferred{e, ty, Rule::Iter, std::move(u),
                    {std::move(*base), std::move(*step), std::move(*count)}};
  }

 private:
  std::optional<Inferred> fail(TypeError err) {
    error = std::move(err);
    return {};
  }

  bool merge_into(Usage& acc, const Usage& more, SourcePos pos) {
    for (const auto& [k, v] : more) {
      std::size_t& slot = acc[k];
      slot += v;
      if (slot > 1) {
        fail(nonlinear(k, slot, pos));
        return false;
      }
    }
    return true;
  }

  template <class F>
  std::optional<Inferred> with_binder(const std::string& name, const Ty& t, F&& f) {
    auto prev = scope_.find(name);
    std::optional<Ty> saved;
    if (prev != scope_.end()) saved = prev->second;
    scope_.insert_or_assign(name, t);
    std::optional<Inferred> r = f();
    if (saved)
      scope_.insert_or_assign(name, *saved);
    else
      scope_.erase(name);
    return r;
  }

  std::map<std::string, Ty> scope_;
};

Derivation build(const Inferred& n, const Ctx& ctx) {
  Derivation d;
  d.ctx = ctx;
  d.expr = n.expr;
  d.type = n.type;
  d.rule = n.rule;
  switch (n.rule) {
    case Rule::Succ:
      d.children.push_back(build(n.kids[0], ctx));
      break;
    case Rule::Lam: {
      const auto* l = n.expr.as<Lam>();
      d.children.push_back(build(n.kids[0], ctx.extended(l->binder, l->annotation)));
      break;
    }
    case Rule::App: {
      d.split = {ctx.filtered(keys(n.kids[0].usage)), ctx.filtered(keys(n.kids[1].usage))};
      d.children.push_back(build(n.kids[0], d.split[0]));
      d.children.push_back(build(n.kids[1], d.split[1]));
      break;
    }
    case Rule::If: {
      d.split = {ctx.filtered(keys(n.kids[0].usage)), ctx.filtered(keys(n.kids[1].usage))};
      d.children.push_back(build(n.kids[0], d.split[0]));
      d.children.push_back(build(n.kids[1], d.split[1]));
      d.children.push_back(build(n.kids[2], d.split[1]));
      break;
    }
    case Rule::Iter: {
      const auto* it = n.expr.as<Iter>();
      std::set<std::string> step_names = keys(n.kids[1].usage);
      step_names.erase(it->binder);
      d.split = {ctx.filtered(keys(n.kids[0].usage)), ctx.filtered(step_names),
                 ctx.filtered(keys(n.kids[2].usage))};
      d.children.push_back(build(n.kids[0], d.split[0]));
      d.children.push_back(build(n.kids[1], d.split[1].extended(it->binder, n.type)));
      d.children.push_back(build(n.kids[2], d.split[2]));
      break;
    }
    default:
      break;
  }
  return d;
}

bool rule_matches(Rule r, const Expr& e) {
  switch (r) {
    case Rule::Var: return e.is<Var>();
    case Rule::True: return e.is<True>();
    case Rule::False: return e.is<False>();
    case Rule::Zero: return e.is<Zero>();
    case Rule::Succ: return e.is<Succ>();
    case Rule::Lam: return e.is<Lam>();
    case Rule::App: return e.is<App>();
    case Rule::If: return e.is<If>();
    case Rule::Iter: return e.is<Iter>();
  }
  return false;
}

bool same_expr(const Expr& a, const Expr& b) {
  return a.get() == b.get() || structurally_equal(a, b);
}

bool validate_node(const Derivation& d) {
  if (!d.expr || !rule_matches(d.rule, d.expr)) return false;
  const auto& kids = d.children;
  auto kids_ok = [&](std::size_t n) {
    if (kids.size() != n) return false;
    for (const auto& k : kids)
      if (!validate_node(k)) return false;
    return true;
  };
  switch (d.rule) {
    case Rule::Var: {
      const auto* v = d.expr.as<Var>();
      return kids.empty() && d.split.empty() && d.ctx == Ctx{{v->name, d.type}};
    }
    case Rule::True:
    case Rule::False:
      return kids.empty() && d.split.empty() && d.ctx.empty() && d.type == Ty::boolean();
    case Rule::Zero:
      return kids.empty() && d.split.empty() && d.ctx.empty() && d.type == Ty::nat();
    case Rule::Succ: {
      if (!kids_ok(1) || !d.split.empty()) return false;
      return same_expr(kids[0].expr, d.expr.as<Succ>()->body) && kids[0].ctx == d.ctx &&
             kids[0].type == Ty::nat() && d.type == Ty::nat();
    }
    case Rule::Lam: {
      if (!kids_ok(1) || !d.split.empty()) return false;
      const auto* l = d.expr.as<Lam>();
      if (d.ctx.contains(l->binder)) return false;
      return same_expr(kids[0].expr, l->body) &&
             kids[0].ctx == d.ctx.extended(l->binder, l->annotation) &&
             d.type == Ty::fn(l->annotation, kids[0].type);
    }
    case Rule::App: {
      if (!kids_ok(2) || d.split.size() != 2) return false;
      const auto* a = d.expr.as<App>();
      return same_expr(kids[0].expr, a->fun) && same_expr(kids[1].expr, a->arg) &&
             kids[0].ctx == d.split[0] && kids[1].ctx == d.split[1] &&
             split_ok(d.ctx, d.split) && kids[0].type == Ty::fn(kids[1].type, d.type);
    }
    case Rule::If: {
      if (!kids_ok(3) || d.split.size() != 2) return false;
      const auto* i = d.expr.as<If>();
      return same_expr(kids[0].expr, i->cond) && same_expr(kids[1].expr, i->then_branch) &&
             same_expr(kids[2].expr, i->else_branch) && kids[0].ctx == d.split[0] &&
             kids[1].ctx == d.split[1] && kids[2].ctx == d.split[1] &&
             split_ok(d.ctx, d.split) && kids[0].type == Ty::boolean() &&
             kids[1].type == d.type && kids[2].type == d.type;
    }
    case Rule::Iter: {
      if (!kids_ok(3) || d.split.size() != 3) return false;
      const auto* it = d.expr.as<Iter>();
      if (d.split[1].contains(it->binder)) return false;
      return same_expr(kids[0].expr, it->base) && same_expr(kids[1].expr, it->step) &&
             same_expr(kids[2].expr, it->count) && kids[0].ctx == d.split[0] &&
             kids[1].ctx == d.split[1].extended(it->binder, d.type) &&
             kids[2].ctx == d.split[2] && split_ok(d.ctx, d.split) && kids[0].type == d.type &&
             kids[1].type == d.type && kids[2].type == Ty::nat();
    }
  }
  return false;
}

void render_into(const Derivation& d, int indent, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "[" << rule_name(d.rule)
     << "] " << to_string(d.ctx) << " |- " << pretty(d.expr) << " : " << to_string(d.type);
  if (!d.split.empty()) {
    os << "   split";
    for (const auto& c : d.split) os << " " << to_string(c);
  }
  os << "\n";
  for (const auto& k : d.children) render_into(k, indent + 1, os);
}

void histogram_into(const Derivation& d, std::vector<std::size_t>& h) {
  ++h[static_cast<std::size_t>(d.rule)];
  for (const auto& k : d.children) histogram_into(k, h);
}

}  // namespace

std::variant<Derivation, TypeError> try_typecheck(const Ctx& ctx, const Expr& e) {
  Checker checker(ctx);
  std::optional<Inferred> root = checker.infer(e);
  if (!root) return *checker.error;
  for (const auto& b : ctx.binders())
    if (!root->usage.contains(b.name)) return unused(b.name, e.pos());
  return build(*root, ctx);
}

Derivation typecheck(const Ctx& ctx, const Expr& e) {
  auto r = try_typecheck(ctx, e);
  if (auto* err = std::get_if<TypeError>(&r)) throw *err;
  return std::get<Derivation>(std::move(r));
}

bool validate(const Derivation& d) {
  try {
    return validate_node(d);
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::string render(const Derivation& d) {
  std::ostringstream os;
  render_into(d, 0, os);
  return os.str();
}

std::vector<std::size_t> rule_histogram(const Derivation& d) {
  std::vector<std::size_t> h(kRuleCount, 0);
  histogram_into(d, h);
  return h;
}

}  // namespace cajal
