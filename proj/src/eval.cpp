#include "cajal/eval.hpp"

#include "cajal/parser.hpp"

namespace cajal {

Expr subst(const Expr& e, std::string_view name, const Expr& v) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return n.name == name ? v : e;
        } else if constexpr (std::is_same_v<T, Succ>) {
          Expr b = subst(n.body, name, v);
          return b.get() == n.body.get() ? e : make_succ(b, e.pos());
        } else if constexpr (std::is_same_v<T, App>) {
          Expr f = subst(n.fun, name, v);
          Expr a = subst(n.arg, name, v);
          if (f.get() == n.fun.get() && a.get() == n.arg.get()) return e;
          return make_app(f, a, e.pos());
        } else if constexpr (std::is_same_v<T, If>) {
          Expr c = subst(n.cond, name, v);
          Expr t = subst(n.then_branch, name, v);
          Expr f = subst(n.else_branch, name, v);
          if (c.get() == n.cond.get() && t.get() == n.then_branch.get() &&
              f.get() == n.else_branch.get())
            return e;
          return make_if(c, t, f, e.pos());
        } else if constexpr (std::is_same_v<T, Lam>) {
          // v is closed, so only shadowing needs handling.
          if (n.binder == name) return e;
          Expr b = subst(n.body, name, v);
          return b.get() == n.body.get() ? e : make_lam(n.binder, n.annotation, b, e.pos());
        } else if constexpr (std::is_same_v<T, Iter>) {
          Expr base = subst(n.base, name, v);
          Expr count = subst(n.count, name, v);
          Expr step = n.binder == name ? n.step : subst(n.step, name, v);
          if (base.get() == n.base.get() && count.get() == n.count.get() &&
              step.get() == n.step.get())
            return e;
          return make_iter(base, n.binder, step, count, e.pos());
        } else {
          return e;
        }
      },
      e.node().v);
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(EvalBudget b) : budget_(b) {}

  Expr run(const Expr& e) {
    tick();
    if (is_value(e)) return e;
    if (const auto* s = e.as<Succ>()) return make_succ(run(s->body));
    if (const auto* a = e.as<App>()) {
      Expr f = run(a->fun);
      const auto* lam = f.as<Lam>();
      if (lam == nullptr) stuck("application of non-function " + pretty(f));
      Expr arg = run(a->arg);
      return run(subst(lam->body, lam->binder, arg));
    }
    if (const auto* i = e.as<If>()) {
      Expr c = run(i->cond);
      if (c.is<True>()) return run(i->then_branch);
      if (c.is<False>()) return run(i->else_branch);
      stuck("conditional on non-boolean " + pretty(c));
    }
    if (const auto* it = e.as<Iter>()) {
      Expr count = run(it->count);
      if (!as_numeral(count)) stuck("iteration count is not a numeral: " + pretty(count));
      return iterate(*it, count);
    }
    if (const auto* v = e.as<Var>()) stuck("free variable " + v->name);
    stuck("no rule applies to " + pretty(e));
  }

  std::uint64_t steps() const { return steps_; }

 private:
  // iter e1 {y -> e2} 0        => value of e1
  // iter e1 {y -> e2} (succ v) => {y := value of iter e1 {y -> e2} v} e2
  Expr iterate(const Iter& it, const Expr& count) {
    if (count.is<Zero>()) return run(it.base);
    const Expr& pred = count.as<Succ>()->body;
    tick();
    Expr prev = iterate(it, pred);
    return run(subst(it.step, it.binder, prev));
  }

  void tick() {
    if (++steps_ > budget_.max_steps)
      throw EvalError(EvalError::Kind::BudgetExceeded,
                      "evaluation exceeded " + std::to_string(budget_.max_steps) + " steps");
  }

  [[noreturn]] void stuck(const std::string& why) {
    throw EvalError(EvalError::Kind::StuckTerm, "stuck term: " + why);
  }

  EvalBudget budget_;
  std::uint64_t steps_ = 0;
};

}  // namespace

EvalResult eval_counted(const Expr& e, EvalBudget budget) {
  Evaluator ev(budget);
  Expr v = ev.run(e);
  return {v, ev.steps()};
}

}  // namespace cajal
