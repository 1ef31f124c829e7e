#include "cajal/compiler.hpp"

#include <exception>
#include <memory>
#include <set>

namespace cajal {

void check_env(const Env& env) {
  if (env.values.size() != env.ctx.length())
    throw ShapeMismatch("environment has " + std::to_string(env.values.size()) +
                        " values for a context of length " + std::to_string(env.ctx.length()));
  for (std::size_t i = 0; i < env.values.size(); ++i) {
    const SemValue& v = env.values[i];
    if (!has_type(v, compile_type(env.ctx[i].type)))
      throw ShapeMismatch("binding " + env.ctx[i].name + " expects " +
                          to_string(compile_type(env.ctx[i].type)) + ", got " +
                          to_string(v.type()));
    if (const auto* x = v.vec2()) {
      check_finite(x->a, "environment entry");
      check_finite(x->b, "environment entry");
    } else if (const auto* s = v.seq()) {
      for (const auto& t : s->terms()) check_finite(t.second, "environment entry");
    }
  }
}

namespace {

// 0-based positions in `from` of each binder of `to`.
std::vector<std::size_t> restriction_plan(const Ctx& from, const Ctx& to) {
  std::vector<std::size_t> plan;
  plan.reserve(to.length());
  for (const auto& b : to.binders()) {
    std::size_t k = from.index_of(b.name);
    if (k == 0) throw NotASubcontext(b.name + " is not bound in " + to_string(from));
    if (!(from[k - 1].type == b.type))
      throw NotASubcontext(b.name + " has type " + to_string(from[k - 1].type) + " in " +
                           to_string(from) + ", not " + to_string(b.type));
    plan.push_back(k - 1);
  }
  return plan;
}

std::vector<SemValue> pick(const std::vector<SemValue>& vals, const std::vector<std::size_t>& plan) {
  std::vector<SemValue> out;
  out.reserve(plan.size());
  for (std::size_t k : plan) out.push_back(vals[k]);
  return out;
}

struct Capture {
  std::set<std::string> top;
  std::set<std::string> captured;
  bool nested = false;
};

RunFn build(const Derivation& d, Capture& cap) {
  switch (d.rule) {
    case Rule::Var:
      return [](const std::vector<SemValue>& v) { return v[0]; };
    case Rule::True:
      return [](const std::vector<SemValue>&) { return SemValue(Vec2{1, 0}); };
    case Rule::False:
      return [](const std::vector<SemValue>&) { return SemValue(Vec2{0, 1}); };
    case Rule::Zero:
      return [](const std::vector<SemValue>&) { return SemValue(Seq::one_hot(0)); };
    case Rule::Succ: {
      RunFn body = build(d.children[0], cap);
      return [body](const std::vector<SemValue>& v) {
        return SemValue(body(v).as_seq().shifted());
      };
    }
    case Rule::Lam: {
      RunFn body = build(d.children[0], cap);
      SemTy dom = compile_type(d.type.domain());
      SemTy cod = compile_type(d.type.codomain());
      return [body, dom, cod](const std::vector<SemValue>& v) {
        return SemValue(LinearMap(dom, cod, [body, v](const SemValue& x) {
          std::vector<SemValue> ext = v;
          ext.push_back(x);
          return body(ext);
        }));
      };
    }
    case Rule::App: {
      RunFn fun = build(d.children[0], cap);
      RunFn arg = build(d.children[1], cap);
      auto pf = restriction_plan(d.ctx, d.split[0]);
      auto pa = restriction_plan(d.ctx, d.split[1]);
      return [fun, arg, pf, pa](const std::vector<SemValue>& v) {
        SemValue f = fun(pick(v, pf));
        return f.as_map()(arg(pick(v, pa)));
      };
    }
    case Rule::If: {
      RunFn cond = build(d.children[0], cap);
      RunFn yes = build(d.children[1], cap);
      RunFn no = build(d.children[2], cap);
      auto pc = restriction_plan(d.ctx, d.split[0]);
      auto pb = restriction_plan(d.ctx, d.split[1]);
      SemTy ty = compile_type(d.type);
      return [cond, yes, no, pc, pb, ty](const std::vector<SemValue>& v) {
        const Vec2 c = cond(pick(v, pc)).as_vec2();
        std::vector<SemValue> branch_env = pick(v, pb);
        if (c.a == 0.0 && c.b == 0.0) return zero(ty);
        if (c.b == 0.0) return scale(c.a, yes(branch_env));
        if (c.a == 0.0) return scale(c.b, no(branch_env));
        return axpby(c.a, yes(branch_env), c.b, no(branch_env));
      };
    }
    case Rule::Iter: {
      for (const auto& b : d.split[1].binders()) {
        if (cap.top.count(b.name))
          cap.captured.insert(b.name);
        else
          cap.nested = true;
      }
      RunFn base = build(d.children[0], cap);
      RunFn step = build(d.children[1], cap);
      RunFn count = build(d.children[2], cap);
      auto p0 = restriction_plan(d.ctx, d.split[0]);
      auto p1 = restriction_plan(d.ctx, d.split[1]);
      auto p2 = restriction_plan(d.ctx, d.split[2]);
      SemTy ty = compile_type(d.type);
      return [base, step, count, p0, p1, p2, ty](const std::vector<SemValue>& v) {
        SemValue n = count(pick(v, p2));
        const Seq& weights = n.as_seq();
        if (weights.empty()) return zero(ty);
        std::vector<SemValue> step_env = pick(v, p1);
        step_env.push_back(zero(ty));
        SemValue state = base(pick(v, p0));
        SemValue acc = zero(ty);
        std::size_t at = 0;
        for (const auto& [k, w] : weights.terms()) {
          for (; at < k; ++at) {
            step_env.back() = state;
            state = step(step_env);
          }
          acc = axpby(1.0, acc, w, state);
        }
        return acc;
      };
    }
  }
  throw std::logic_error("unknown typing rule");
}

}  // namespace

Env restrict(const Env& env, const Ctx& target) {
  return {target, pick(env.values, restriction_plan(env.ctx, target))};
}

CompiledProgram compile(const Derivation& d) {
  Capture cap;
  cap.top = d.ctx.names();
  CompiledProgram p;
  p.signature = d.ctx;
  p.result = compile_type(d.type);
  p.run = build(d, cap);
  p.nested_capture = cap.nested;
  for (const auto& b : d.ctx.binders()) p.captured.push_back(cap.captured.count(b.name) > 0);
  return p;
}

SemValue link(const CompiledProgram& p, const Env& env) {
  if (!(env.ctx == p.signature))
    throw ShapeMismatch("environment for " + to_string(env.ctx) + " linked against " +
                        to_string(p.signature));
  check_env(env);
  return p.run(env.values);
}

namespace {

struct Probe {
  SemTy domain = SemTy::vbool();
  SemTy codomain = SemTy::vbool();
  std::function<SemValue(const SemValue&)> apply;
};

Probe probe_of(const CompiledProgram& p) {
  if (p.signature.length() == 1) {
    SemTy dom = compile_type(p.signature[0].type);
    if (!dom.is_base() || !p.result.is_base())
      throw UnsupportedSignature("matrix extraction needs a base-type slot and base-type result");
    return {dom, p.result, [&p](const SemValue& x) { return p.run({x}); }};
  }
  if (p.signature.empty() && p.result.is_fn() && p.result.domain().is_base() &&
      p.result.codomain().is_base()) {
    SemValue f = p.run({});
    return {p.result.domain(), p.result.codomain(),
            [f](const SemValue& x) { return f.as_map()(x); }};
  }
  throw UnsupportedSignature("matrix extraction needs exactly one base-type binder, got " +
                             to_string(p.signature));
}

void fill_column(const Probe& pr, std::size_t j, Matrix& m) {
  std::vector<Scalar> e(m.cols, 0.0);
  e[j] = 1.0;
  std::vector<Scalar> col = to_dense(pr.apply(from_dense(pr.domain, e)), m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) m(i, j) = col[i];
}

}  // namespace

Matrix matrix_of(const CompiledProgram& p, std::size_t trunc) {
  if (trunc == 0) throw std::invalid_argument("trunc must be at least 1");
  Probe pr = probe_of(p);
  Matrix m(dense_dim(pr.codomain, trunc), dense_dim(pr.domain, trunc));
  for (std::size_t j = 0; j < m.cols; ++j) fill_column(pr, j, m);
  return m;
}

Matrix matrix_of_parallel(const CompiledProgram& p, std::size_t trunc) {
  if (trunc == 0) throw std::invalid_argument("trunc must be at least 1");
  Probe pr = probe_of(p);
  Matrix m(dense_dim(pr.codomain, trunc), dense_dim(pr.domain, trunc));
  const auto cols = static_cast<long>(m.cols);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < cols; ++j) {
    try {
      fill_column(pr, static_cast<std::size_t>(j), m);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

}  // namespace cajal
