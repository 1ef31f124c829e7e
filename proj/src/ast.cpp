#include "cajal/ast.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cajal {

Ty Ty::fn(Ty domain, Ty codomain) {
  return Ty(Kind::Fn, std::make_shared<const Ty>(std::move(domain)),
            std::make_shared<const Ty>(std::move(codomain)));
}

int Ty::order() const {
  if (!is_fn()) return 0;
  return std::max(domain().order() + 1, codomain().order());
}

bool operator==(const Ty& a, const Ty& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != Ty::Kind::Fn) return true;
  return *a.domain_ == *b.domain_ && *a.codomain_ == *b.codomain_;
}

std::string to_string(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Bool:
      return "Bool";
    case Ty::Kind::Nat:
      return "Nat";
    case Ty::Kind::Fn: {
      std::string lhs = to_string(t.domain());
      if (t.domain().is_fn()) lhs = "(" + lhs + ")";
      return lhs + " -o " + to_string(t.codomain());
    }
  }
  return "?";
}

namespace {

Expr make(ExprVariant v, SourcePos pos) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{std::move(v), pos}));
}

}  // namespace

Expr make_var(std::string name, SourcePos pos) { return make(Var{std::move(name)}, pos); }
Expr make_true(SourcePos pos) { return make(True{}, pos); }
Expr make_false(SourcePos pos) { return make(False{}, pos); }
Expr make_zero(SourcePos pos) { return make(Zero{}, pos); }
Expr make_succ(Expr body, SourcePos pos) { return make(Succ{std::move(body)}, pos); }
Expr make_iter(Expr base, std::string binder, Expr step, Expr count, SourcePos pos) {
  return make(Iter{std::move(base), std::move(binder), std::move(step), std::move(count)}, pos);
}
Expr make_lam(std::string binder, Ty annotation, Expr body, SourcePos pos) {
  return make(Lam{std::move(binder), std::move(annotation), std::move(body)}, pos);
}
Expr make_app(Expr fun, Expr arg, SourcePos pos) {
  return make(App{std::move(fun), std::move(arg)}, pos);
}
Expr make_if(Expr cond, Expr then_branch, Expr else_branch, SourcePos pos) {
  return make(If{std::move(cond), std::move(then_branch), std::move(else_branch)}, pos);
}

Expr numeral(std::size_t n) {
  Expr e = make_zero();
  for (std::size_t i = 0; i < n; ++i) e = make_succ(e);
  return e;
}

std::optional<std::size_t> as_numeral(const Expr& e) {
  std::size_t n = 0;
  const Expr* cur = &e;
  while (const auto* s = cur->as<Succ>()) {
    ++n;
    cur = &s->body;
  }
  if (cur->is<Zero>()) return n;
  return std::nullopt;
}

bool is_value(const Expr& e) {
  if (e.is<True>() || e.is<False>() || e.is<Lam>()) return true;
  return as_numeral(e).has_value();
}

namespace {

bool equal_impl(const Expr& a, const Expr& b, std::map<std::string, std::string>& ren,
                bool alpha) {
  if (a.get() == b.get() && ren.empty()) return true;
  const auto& va = a.node().v;
  const auto& vb = b.node().v;
  if (va.index() != vb.index()) return false;

  auto rebind = [&](const std::string& x, const std::string& y, auto&& body) {
    auto old = ren.find(x);
    std::optional<std::string> saved;
    if (old != ren.end()) saved = old->second;
    ren[x] = y;
    bool r = body();
    if (saved)
      ren[x] = *saved;
    else
      ren.erase(x);
    return r;
  };

  if (const auto* x = a.as<Var>()) {
    const auto* y = b.as<Var>();
    auto it = ren.find(x->name);
    if (it != ren.end()) return it->second == y->name;
    return x->name == y->name;
  }
  if (a.is<True>() || a.is<False>() || a.is<Zero>()) return true;
  if (const auto* x = a.as<Succ>()) return equal_impl(x->body, b.as<Succ>()->body, ren, alpha);
  if (const auto* x = a.as<App>()) {
    const auto* y = b.as<App>();
    return equal_impl(x->fun, y->fun, ren, alpha) && equal_impl(x->arg, y->arg, ren, alpha);
  }
  if (const auto* x = a.as<If>()) {
    const auto* y = b.as<If>();
    return equal_impl(x->cond, y->cond, ren, alpha) &&
           equal_impl(x->then_branch, y->then_branch, ren, alpha) &&
           equal_impl(x->else_branch, y->else_branch, ren, alpha);
  }
  if (const auto* x = a.as<Lam>()) {
    const auto* y = b.as<Lam>();
    if (!(x->annotation == y->annotation)) return false;
    if (!alpha && x->binder != y->binder) return false;
    return rebind(x->binder, y->binder, [&] { return equal_impl(x->body, y->body, ren, alpha); });
  }
  if (const auto* x = a.as<Iter>()) {
    const auto* y = b.as<Iter>();
    if (!alpha && x->binder != y->binder) return false;
    if (!equal_impl(x->base, y->base, ren, alpha) || !equal_impl(x->count, y->count, ren, alpha))
      return false;
    return rebind(x->binder, y->binder, [&] { return equal_impl(x->step, y->step, ren, alpha); });
  }
  return false;
}

void free_vars_impl(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          if (!bound.contains(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Succ>) {
          free_vars_impl(n.body, bound, out);
        } else if constexpr (std::is_same_v<T, App>) {
          free_vars_impl(n.fun, bound, out);
          free_vars_impl(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, If>) {
          free_vars_impl(n.cond, bound, out);
          free_vars_impl(n.then_branch, bound, out);
          free_vars_impl(n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<T, Lam>) {
          bool fresh = bound.insert(n.binder).second;
          free_vars_impl(n.body, bound, out);
          if (fresh) bound.erase(n.binder);
        } else if constexpr (std::is_same_v<T, Iter>) {
          free_vars_impl(n.base, bound, out);
          free_vars_impl(n.count, bound, out);
          bool fresh = bound.insert(n.binder).second;
          free_vars_impl(n.step, bound, out);
          if (fresh) bound.erase(n.binder);
        }
      },
      e.node().v);
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  std::map<std::string, std::string> ren;
  return equal_impl(a, b, ren, false);
}

bool alpha_equivalent(const Expr& a, const Expr& b) {
  std::map<std::string, std::string> ren;
  return equal_impl(a, b, ren, true);
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> bound, out;
  free_vars_impl(e, bound, out);
  return out;
}

std::size_t count_free(const Expr& e, std::string_view name) {
  return std::visit(
      [&](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return n.name == name ? 1 : 0;
        } else if constexpr (std::is_same_v<T, Succ>) {
          return count_free(n.body, name);
        } else if constexpr (std::is_same_v<T, App>) {
          return count_free(n.fun, name) + count_free(n.arg, name);
        } else if constexpr (std::is_same_v<T, If>) {
          return count_free(n.cond, name) + count_free(n.then_branch, name) +
                 count_free(n.else_branch, name);
        } else if constexpr (std::is_same_v<T, Lam>) {
          return n.binder == name ? 0 : count_free(n.body, name);
        } else if constexpr (std::is_same_v<T, Iter>) {
          std::size_t c = count_free(n.base, name) + count_free(n.count, name);
          if (n.binder != name) c += count_free(n.step, name);
          return c;
        } else {
          return 0;
        }
      },
      e.node().v);
}

std::vector<std::string> binders(const Expr& e) {
  std::vector<std::string> out;
  auto go = [&](auto&& self, const Expr& x) -> void {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Succ>) {
            self(self, n.body);
          } else if constexpr (std::is_same_v<T, App>) {
            self(self, n.fun);
            self(self, n.arg);
          } else if constexpr (std::is_same_v<T, If>) {
            self(self, n.cond);
            self(self, n.then_branch);
            self(self, n.else_branch);
          } else if constexpr (std::is_same_v<T, Lam>) {
            out.push_back(n.binder);
            self(self, n.body);
          } else if constexpr (std::is_same_v<T, Iter>) {
            self(self, n.base);
            out.push_back(n.binder);
            self(self, n.step);
            self(self, n.count);
          }
        },
        x.node().v);
  };
  go(go, e);
  return out;
}

std::size_t size(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Succ>) {
          return 1 + size(n.body);
        } else if constexpr (std::is_same_v<T, App>) {
          return 1 + size(n.fun) + size(n.arg);
        } else if constexpr (std::is_same_v<T, If>) {
          return 1 + size(n.cond) + size(n.then_branch) + size(n.else_branch);
        } else if constexpr (std::is_same_v<T, Lam>) {
          return 1 + size(n.body);
        } else if constexpr (std::is_same_v<T, Iter>) {
          return 1 + size(n.base) + size(n.step) + size(n.count);
        } else {
          return 1;
        }
      },
      e.node().v);
}

std::size_t depth(const Expr& e) {
  if (as_numeral(e)) return 1;
  return std::visit(
      [](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Succ>) {
          return 1 + depth(n.body);
        } else if constexpr (std::is_same_v<T, App>) {
          return 1 + std::max(depth(n.fun), depth(n.arg));
        } else if constexpr (std::is_same_v<T, If>) {
          return 1 + std::max({depth(n.cond), depth(n.then_branch), depth(n.else_branch)});
        } else if constexpr (std::is_same_v<T, Lam>) {
          return 1 + depth(n.body);
        } else if constexpr (std::is_same_v<T, Iter>) {
          return 1 + std::max({depth(n.base), depth(n.step), depth(n.count)});
        } else {
          return 1;
        }
      },
      e.node().v);
}

namespace {

struct Renamer {
  std::set<std::string> used;

  std::string fresh(const std::string& base) {
    if (used.insert(base).second) return base;
    for (std::size_t k = 1;; ++k) {
      std::string cand = base + std::to_string(k);
      if (used.insert(cand).second) return cand;
    }
  }

  Expr go(const Expr& e, std::map<std::string, std::string>& scope) {
    const SourcePos pos = e.pos();
    return std::visit(
        [&](const auto& n) -> Expr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Var>) {
            auto it = scope.find(n.name);
            if (it == scope.end() || it->second == n.name) return e;
            return make_var(it->second, pos);
          } else if constexpr (std::is_same_v<T, Succ>) {
            return make_succ(go(n.body, scope), pos);
          } else if constexpr (std::is_same_v<T, App>) {
            Expr f = go(n.fun, scope);
            return make_app(f, go(n.arg, scope), pos);
          } else if constexpr (std::is_same_v<T, If>) {
            Expr c = go(n.cond, scope);
            Expr t = go(n.then_branch, scope);
            return make_if(c, t, go(n.else_branch, scope), pos);
          } else if constexpr (std::is_same_v<T, Lam>) {
            std::string b = fresh(n.binder);
            auto saved = scope;
            scope[n.binder] = b;
            Expr body = go(n.body, scope);
            scope = std::move(saved);
            return make_lam(b, n.annotation, body, pos);
          } else if constexpr (std::is_same_v<T, Iter>) {
            Expr base = go(n.base, scope);
            std::string b = fresh(n.binder);
            auto saved = scope;
            scope[n.binder] = b;
            Expr step = go(n.step, scope);
            scope = std::move(saved);
            Expr count = go(n.count, scope);
            return make_iter(base, b, step, count, pos);
          } else {
            return e;
          }
        },
        e.node().v);
  }
};

}  // namespace

Expr alpha_rename(const Expr& e, const std::set<std::string>& reserved) {
  Renamer r;
  r.used = free_vars(e);
  r.used.insert(reserved.begin(), reserved.end());
  std::map<std::string, std::string> scope;
  return r.go(e, scope);
}

Ctx::Ctx(std::initializer_list<Binding> bs) : Ctx(std::vector<Binding>(bs)) {}

Ctx::Ctx(std::vector<Binding> bs) : binders_(std::move(bs)) {
  std::set<std::string> seen;
  for (const auto& b : binders_)
    if (!seen.insert(b.name).second)
      throw std::invalid_argument("duplicate binder in context: " + b.name);
}

std::size_t Ctx::index_of(std::string_view name) const {
  for (std::size_t i = binders_.size(); i > 0; --i)
    if (binders_[i - 1].name == name) return i;
  return 0;
}

std::vector<std::size_t> Ctx::index_set() const {
  std::vector<std::size_t> out(binders_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i + 1;
  return out;
}

const Ty* Ctx::lookup(std::string_view name) const {
  std::size_t i = index_of(name);
  return i == 0 ? nullptr : &binders_[i - 1].type;
}

std::set<std::string> Ctx::names() const {
  std::set<std::string> out;
  for (const auto& b : binders_) out.insert(b.name);
  return out;
}

Ctx Ctx::concat(const Ctx& other) const {
  std::vector<Binding> bs = binders_;
  bs.insert(bs.end(), other.binders_.begin(), other.binders_.end());
  return Ctx(std::move(bs));
}

Ctx Ctx::extended(std::string name, Ty type) const {
  std::vector<Binding> bs = binders_;
  bs.push_back({std::move(name), std::move(type)});
  return Ctx(std::move(bs));
}

Ctx Ctx::filtered(const std::set<std::string>& keep) const {
  std::vector<Binding> bs;
  for (const auto& b : binders_)
    if (keep.contains(b.name)) bs.push_back(b);
  return Ctx(std::move(bs));
}

std::string to_string(const Ctx& c) {
  if (c.empty()) return "()";
  std::string s = "(";
  for (std::size_t i = 0; i < c.length(); ++i) {
    if (i) s += ", ";
    s += c[i].name + ":" + to_string(c[i].type);
  }
  return s + ")";
}

}  // namespace cajal
