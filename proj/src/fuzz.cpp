#include "cajal/fuzz.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <set>

#include "cajal/parser.hpp"

namespace cajal {

namespace {

struct Backtrack {};

struct Scope {
  std::set<std::string> slots;
  bool inside_fn_iter = false;
};

class Builder {
 public:
  Builder(const GenConfig& cfg, std::mt19937_64& rng, Scope scope)
      : cfg_(cfg), rng_(rng), scope_(std::move(scope)) {}

  Expr gen(const std::vector<Binding>& ctx, const Ty& ty, std::size_t depth) {
    if (++attempts_ > cfg_.max_attempts) throw GenerationFailed("attempt budget exhausted");
    if (!feasible(ctx, ty, depth)) throw Backtrack{};
    std::vector<Rule> rules = candidate_rules(ctx, ty, depth);
    while (!rules.empty()) {
      std::size_t k = pick_weighted(rules);
      Rule r = rules[k];
      rules.erase(rules.begin() + static_cast<long>(k));
      try {
        return apply(r, ctx, ty, depth);
      } catch (const Backtrack&) {
      }
    }
    throw Backtrack{};
  }

 private:
  static bool feasible(const std::vector<Binding>& ctx, const Ty& ty, std::size_t depth) {
    if (depth == 0) return false;
    if (depth == 1) {
      if (ctx.empty()) return ty.is_base();
      return ctx.size() == 1 && ctx[0].type == ty;
    }
    return true;
  }

  std::vector<Rule> candidate_rules(const std::vector<Binding>& ctx, const Ty& ty,
                                    std::size_t depth) const {
    std::vector<Rule> out;
    if (ctx.size() == 1 && ctx[0].type == ty) out.push_back(Rule::Var);
    if (ctx.empty() && ty == Ty::boolean()) {
      out.push_back(Rule::True);
      out.push_back(Rule::False);
    }
    if (ctx.empty() && ty == Ty::nat()) out.push_back(Rule::Zero);
    if (depth >= 2) {
      if (ty == Ty::nat()) out.push_back(Rule::Succ);
      if (ty.is_fn()) out.push_back(Rule::Lam);
      out.push_back(Rule::App);
      out.push_back(Rule::If);
      if (!(ty.is_fn() && cfg_.bounded_counts && scope_.inside_fn_iter)) out.push_back(Rule::Iter);
    }
    return out;
  }

  std::size_t pick_weighted(const std::vector<Rule>& rules) {
    std::vector<double> w;
    for (Rule r : rules) w.push_back(cfg_.rule_weights[static_cast<int>(r)]);
    if (std::accumulate(w.begin(), w.end(), 0.0) <= 0) return 0;
    std::discrete_distribution<std::size_t> d(w.begin(), w.end());
    return d(rng_);
  }

  std::string fresh(const char* base) {
    std::string name;
    do {
      name = base + std::to_string(counter_++);
    } while (scope_.slots.count(name));
    return name;
  }

  Ty random_arg_type() {
    static const std::vector<Ty> choices{Ty::boolean(), Ty::nat(),
                                         Ty::fn(Ty::boolean(), Ty::boolean()),
                                         Ty::fn(Ty::nat(), Ty::nat())};
    const auto& tw = cfg_.type_weights;
    std::discrete_distribution<std::size_t> d{tw[0], tw[1], tw[2] / 2, tw[2] / 2};
    return choices[d(rng_)];
  }

  // Random assignment of each binder to one of `parts` parts; `allowed`
  // filters which parts may receive a given binder.
  template <class Allowed>
  std::vector<std::vector<Binding>> split(const std::vector<Binding>& ctx, std::size_t parts,
                                          Allowed allowed) {
    std::vector<std::vector<Binding>> out(parts);
    for (const auto& b : ctx) {
      std::vector<std::size_t> ok;
      for (std::size_t p = 0; p < parts; ++p)
        if (allowed(b, p)) ok.push_back(p);
      if (ok.empty()) throw Backtrack{};
      std::uniform_int_distribution<std::size_t> d(0, ok.size() - 1);
      out[ok[d(rng_)]].push_back(b);
    }
    return out;
  }

  Expr numeral_leaf() {
    std::uniform_int_distribution<std::size_t> d(0, cfg_.max_numeral);
    return numeral(d(rng_));
  }

  Expr apply(Rule r, const std::vector<Binding>& ctx, const Ty& ty, std::size_t depth) {
    switch (r) {
      case Rule::Var: return make_var(ctx[0].name);
      case Rule::True: return make_true();
      case Rule::False: return make_false();
      case Rule::Zero: return numeral_leaf();
      case Rule::Succ: return make_succ(gen(ctx, Ty::nat(), depth - 1));
      case Rule::Lam: {
        std::string x = fresh("x");
        std::vector<Binding> inner = ctx;
        inner.push_back({x, ty.domain()});
        return make_lam(x, ty.domain(), gen(inner, ty.codomain(), depth - 1));
      }
      case Rule::App: {
        Ty arg = random_arg_type();
        Ty fun = Ty::fn(arg, ty);
        if (fun.order() > 2) throw Backtrack{};
        auto parts = split(ctx, 2, [](const Binding&, std::size_t) { return true; });
        Expr f = gen(parts[0], fun, depth - 1);
        Expr a = gen(parts[1], arg, depth - 1);
        return make_app(f, a);
      }
      case Rule::If: {
        auto parts = split(ctx, 2, [](const Binding&, std::size_t) { return true; });
        Expr c = gen(parts[0], Ty::boolean(), depth - 1);
        Expr t = gen(parts[1], ty, depth - 1);
        Expr e = gen(parts[1], ty, depth - 1);
        return make_if(c, t, e);
      }
      case Rule::Iter: {
        const bool fn_state = ty.is_fn();
        auto parts = split(ctx, 3, [&](const Binding& b, std::size_t p) {
          if (p == 1 && cfg_.slot_only_captures) return scope_.slots.count(b.name) > 0;
          if (p != 2 || !cfg_.bounded_counts) return true;
          if (!scope_.slots.count(b.name)) return false;
          return !fn_state || b.type == Ty::nat();
        });
        if (cfg_.bounded_counts && fn_state && parts[2].size() > 1) throw Backtrack{};
        std::string y = fresh("y");
        Expr count;
        if (cfg_.bounded_counts && fn_state)
          count = parts[2].empty() ? numeral_leaf() : make_var(parts[2][0].name);
        else
          count = gen(parts[2], Ty::nat(), depth - 1);
        Expr base = gen(parts[0], ty, depth - 1);
        std::vector<Binding> step_ctx = parts[1];
        step_ctx.push_back({y, ty});
        bool saved = scope_.inside_fn_iter;
        if (fn_state) scope_.inside_fn_iter = true;
        Expr step;
        try {
          step = gen(step_ctx, ty, depth - 1);
        } catch (...) {
          scope_.inside_fn_iter = saved;
          throw;
        }
        scope_.inside_fn_iter = saved;
        return make_iter(base, y, step, count);
      }
    }
    throw Backtrack{};
  }

  const GenConfig& cfg_;
  std::mt19937_64& rng_;
  Scope scope_;
  std::size_t attempts_ = 0;
  std::size_t counter_ = 0;
};

}  // namespace

Generator::Generator(GenConfig cfg) : cfg_(cfg), rng_(cfg.seed) {}

Expr Generator::next(const Ctx& ctx, const Ty& ty) {
  if (cfg_.max_depth == 0) throw GenerationFailed("max_depth must be at least 1");
  Scope scope;
  scope.slots = ctx.names();
  for (int attempt = 0; attempt < 64; ++attempt) {
    Builder b(cfg_, rng_, scope);
    try {
      Expr e = alpha_rename(b.gen(ctx.binders(), ty, cfg_.max_depth), ctx.names());
      typecheck(ctx, e);
      return e;
    } catch (const Backtrack&) {
    } catch (const GenerationFailed&) {
    }
  }
  throw GenerationFailed("no program of type " + to_string(ty) + " over " + to_string(ctx) +
                         " within depth " + std::to_string(cfg_.max_depth));
}

Expr gen_typed(const GenConfig& cfg, const Ctx& ctx, const Ty& ty) {
  Generator g(cfg);
  return g.next(ctx, ty);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Empty string on success, otherwise why the trial fails.
std::string judge(const Expr& e, EvalBudget budget, Verdict* out) {
  Derivation d = typecheck({}, e);
  if (!d.type.is_base()) return "differential trials need a base result type";
  SemValue den = link(compile(d), unit_env());
  EvalResult r;
  try {
    r = eval_counted(e, budget);
  } catch (const EvalError& err) {
    if (out) out->eval_error = err.kind();
    return std::string("evaluation failed: ") + err.what();
  }
  if (out) {
    out->value = r.value;
    out->denotation = den;
    out->eval_steps = r.steps;
  }
  SemValue den_v = link(compile(typecheck({}, r.value)), unit_env());
  if (!approx_equal(den, den_v))
    return "denotation " + to_string(den) + " differs from that of its value " + pretty(r.value) +
           ", " + to_string(den_v);
  if (d.type == Ty::boolean()) {
    SemValue other = r.value.is<True>() ? SemValue(Vec2{0, 1}) : SemValue(Vec2{1, 0});
    if (exactly_equal(den, other)) return "denotation coincides with the other boolean";
  } else {
    const auto& terms = den.as_seq().terms();
    std::size_t n = *as_numeral(r.value);
    if (terms.size() != 1 || terms[0].first != n)
      return "denotation " + to_string(den) + " is not supported exactly at " + std::to_string(n);
  }
  return {};
}

void closed_base_subterms(const Expr& e, std::vector<Expr>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Succ>) {
          out.push_back(n.body);
          closed_base_subterms(n.body, out);
        } else if constexpr (std::is_same_v<T, Iter>) {
          for (const Expr* k : {&n.base, &n.step, &n.count}) {
            out.push_back(*k);
            closed_base_subterms(*k, out);
          }
        } else if constexpr (std::is_same_v<T, Lam>) {
          out.push_back(n.body);
          closed_base_subterms(n.body, out);
        } else if constexpr (std::is_same_v<T, App>) {
          for (const Expr* k : {&n.fun, &n.arg}) {
            out.push_back(*k);
            closed_base_subterms(*k, out);
          }
        } else if constexpr (std::is_same_v<T, If>) {
          for (const Expr* k : {&n.cond, &n.then_branch, &n.else_branch}) {
            out.push_back(*k);
            closed_base_subterms(*k, out);
          }
        }
      },
      e.node().v);
}

bool still_fails(const Expr& e, EvalBudget budget) {
  try {
    if (!free_vars(e).empty()) return false;
    Derivation d = typecheck({}, e);
    if (!d.type.is_base()) return false;
    return !judge(e, budget, nullptr).empty();
  } catch (const TypeError&) {
    return false;
  } catch (const std::exception&) {
    return true;
  }
}

Expr shrink(Expr e, EvalBudget budget) {
  for (bool progress = true; progress;) {
    progress = false;
    std::vector<Expr> subs;
    closed_base_subterms(e, subs);
    std::sort(subs.begin(), subs.end(),
              [](const Expr& a, const Expr& b) { return size(a) < size(b); });
    for (const Expr& s : subs) {
      if (size(s) < size(e) && still_fails(s, budget)) {
        e = s;
        progress = true;
        break;
      }
    }
  }
  return e;
}

}  // namespace

Verdict differential_trial(const Expr& e, EvalBudget budget) {
  Verdict v;
  v.program = e;
  std::string why;
  try {
    why = judge(e, budget, &v);
  } catch (const std::exception& err) {
    why = err.what();
  }
  v.pass = why.empty();
  if (!v.pass) {
    v.reason = why;
    v.counterexample = shrink(e, budget);
  }
  return v;
}

namespace {

Expr trial_program(const GenConfig& cfg, std::size_t i) {
  GenConfig c = cfg;
  for (std::uint64_t attempt = 0;; ++attempt) {
    c.seed = derive_seed(cfg.seed, i + attempt * 0x100000000ULL);
    Generator g(c);
    std::discrete_distribution<int> pick{cfg.type_weights[0], cfg.type_weights[1]};
    Ty ty = pick(g.rng()) == 0 ? Ty::boolean() : Ty::nat();
    try {
      return g.next({}, ty);
    } catch (const GenerationFailed&) {
      if (attempt > 16) throw;
    }
  }
}

void tally(TrialReport& rep) {
  for (const Verdict& v : rep.verdicts) {
    if (!v.pass) ++rep.failures;
    if (v.eval_error == EvalError::Kind::BudgetExceeded) ++rep.budget_exceeded;
    if (v.eval_error == EvalError::Kind::StuckTerm) ++rep.stuck;
    auto h = rule_histogram(typecheck({}, v.program));
    for (int r = 0; r < kRuleCount; ++r)
      if (h[r] > 0) ++rep.rule_presence[r];
  }
}

}  // namespace

TrialReport run_trials(const GenConfig& cfg, std::size_t trials) {
  TrialReport rep;
  rep.verdicts.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) rep.verdicts.push_back(differential_trial(trial_program(cfg, i)));
  tally(rep);
  return rep;
}

TrialReport run_trials_parallel(const GenConfig& cfg, std::size_t trials) {
  TrialReport rep;
  rep.verdicts.resize(trials);
  std::exception_ptr failure;
  const auto n = static_cast<long>(trials);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      rep.verdicts[i] = differential_trial(trial_program(cfg, static_cast<std::size_t>(i)));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  tally(rep);
  return rep;
}

namespace {

// Real-valued linear functional on a compiled type.
std::function<Scalar(const SemValue&)> random_functional(const SemTy& t, std::mt19937_64& rng) {
  if (t.is_base()) {
    SemValue w = random_value(t, rng);
    return [w](const SemValue& x) { return inner(w, x); };
  }
  SemValue at = random_value(t.domain(), rng);
  auto next = random_functional(t.codomain(), rng);
  return [at, next](const SemValue& f) { return next(f.as_map()(at)); };
}

}  // namespace

SemValue random_value(const SemTy& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-2, 2);
  switch (t.kind()) {
    case SemTy::Kind::VBool: return Vec2{coeff(rng), coeff(rng)};
    case SemTy::Kind::VNat: {
      std::uniform_int_distribution<std::size_t> len(1, 3), idx(0, 5);
      std::vector<Seq::Term> terms;
      for (std::size_t i = len(rng); i > 0; --i) terms.push_back({idx(rng), coeff(rng)});
      return Seq::from_terms(std::move(terms));
    }
    case SemTy::Kind::VFn: {
      // Sum of two rank-one maps x |-> phi(x) c.
      auto p1 = random_functional(t.domain(), rng);
      auto p2 = random_functional(t.domain(), rng);
      SemValue c1 = random_value(t.codomain(), rng);
      SemValue c2 = random_value(t.codomain(), rng);
      return LinearMap(t.domain(), t.codomain(), [p1, p2, c1, c2](const SemValue& x) {
        return axpby(p1(x), c1, p2(x), c2);
      });
    }
  }
  return Vec2{};
}

OpenCase gen_open_case(Generator& gen) {
  auto& rng = gen.rng();
  const std::vector<Ty> slot_types{Ty::boolean(), Ty::nat(), Ty::fn(Ty::boolean(), Ty::boolean()),
                                   Ty::fn(Ty::nat(), Ty::nat()),
                                   Ty::fn(Ty::fn(Ty::boolean(), Ty::boolean()), Ty::boolean())};
  std::discrete_distribution<std::size_t> pick_ty{3, 3, 1, 1, 0.5};
  std::uniform_int_distribution<std::size_t> len(1, 3);
  for (int attempt = 0;; ++attempt) {
    std::vector<Binding> bs;
    for (std::size_t i = len(rng); i > 0; --i)
      bs.push_back({"s" + std::to_string(bs.size()), slot_types[pick_ty(rng)]});
    Ctx ctx(bs);
    Ty ty = rng() % 2 == 0 ? Ty::boolean() : Ty::nat();
    try {
      OpenCase c;
      c.ctx = ctx;
      c.program = gen.next(ctx, ty);
      c.derivation = typecheck(ctx, c.program);
      for (const auto& b : bs) c.env.push_back(random_value(compile_type(b.type), rng));
      return c;
    } catch (const GenerationFailed&) {
      if (attempt > 64) throw;
    }
  }
}

namespace {

bool same_base(const SemValue& u, const SemValue& v) { return approx_equal(u, v); }

}  // namespace

MultilinearityResult check_multilinearity(const OpenCase& c, std::mt19937_64& rng) {
  CompiledProgram p = compile(c.derivation);
  std::uniform_real_distribution<double> coeff(-2, 2);
  MultilinearityResult res;
  for (std::size_t i = 0; i < c.ctx.length(); ++i) {
    SlotCheck s;
    s.binder = c.ctx[i].name;
    s.linear_by_construction = p.slot_is_linear(i);
    SemTy t = compile_type(c.ctx[i].type);
    SemValue x1 = random_value(t, rng), x2 = random_value(t, rng);
    double a = coeff(rng), b = coeff(rng);
    auto run_with = [&](const SemValue& x) {
      std::vector<SemValue> env = c.env;
      env[i] = x;
      return p.run(env);
    };
    SemValue lhs = run_with(axpby(a, x1, b, x2));
    SemValue rhs = axpby(a, run_with(x1), b, run_with(x2));
    s.additive = same_base(lhs, rhs);
    s.homogeneous = same_base(run_with(scale(a, x1)), scale(a, run_with(x1)));
    res.slots.push_back(s);
  }
  return res;
}

Expr close_case(const OpenCase& c, Generator& gen) {
  Expr e = c.program;
  for (const auto& b : c.ctx.binders()) {
    Expr v = eval(gen.next({}, b.type));
    e = subst(e, b.name, v);
  }
  return alpha_rename(e);
}

bool check_substitution(const OpenCase& c, Generator& gen) {
  std::uniform_int_distribution<std::size_t> pick(0, c.ctx.length() - 1);
  std::size_t k = pick(gen.rng());
  const Binding x = c.ctx[k];
  std::vector<Binding> rest;
  std::vector<SemValue> rest_env;
  for (std::size_t i = 0; i < c.ctx.length(); ++i) {
    if (i == k) continue;
    rest.push_back(c.ctx[i]);
    rest_env.push_back(c.env[i]);
  }
  Expr v = eval(gen.next({}, x.type));
  Ctx rest_ctx(rest);
  Expr substituted = alpha_rename(subst(c.program, x.name, v), rest_ctx.names());
  SemValue lhs = link(compile(typecheck(rest_ctx, substituted)), {rest_ctx, rest_env});

  Ctx moved = rest_ctx.extended(x.name, x.type);
  std::vector<SemValue> moved_env = rest_env;
  moved_env.push_back(link(compile(typecheck({}, v)), unit_env()));
  SemValue rhs = link(compile(typecheck(moved, c.program)), {moved, moved_env});
  return same_base(lhs, rhs);
}

bool check_exchange(const OpenCase& c, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(c.ctx.length());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Binding> bs;
  std::vector<SemValue> env;
  for (std::size_t i : perm) {
    bs.push_back(c.ctx[i]);
    env.push_back(c.env[i]);
  }
  Ctx permuted(bs);
  SemValue lhs = link(compile(c.derivation), {c.ctx, c.env});
  SemValue rhs = link(compile(typecheck(permuted, c.program)), {permuted, env});
  return same_base(lhs, rhs);
}

}  // namespace cajal
