#include "cajal/diffcheck.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "cajal/parser.hpp"

namespace cajal {

DynSystem two_neuron_system() {
  DynSystem sys;
  sys.init = Vec2{1, 0};
  sys.transition(0, 1) = 2;
  sys.transition(1, 0) = 3;
  return sys;
}

namespace {

Vec2 apply2(const Matrix& m, const Vec2& v) {
  return {m(0, 0) * v.a + m(0, 1) * v.b, m(1, 0) * v.a + m(1, 1) * v.b};
}

}  // namespace

std::vector<Vec2> unfold(const DynSystem& sys, std::size_t steps) {
  std::vector<Vec2> out{sys.init};
  out.reserve(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) out.push_back(apply2(sys.transition, out.back()));
  return out;
}

Vec2 g_restricted(const DynSystem& sys, const std::vector<Scalar>& x) {
  Vec2 acc{0, 0};
  Vec2 state = sys.init;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc.a += x[i] * state.a;
    acc.b += x[i] * state.b;
    if (i + 1 < x.size()) state = apply2(sys.transition, state);
  }
  return acc;
}

namespace {

struct Probes {
  std::size_t slot = 0;
  Gradient shape;
  std::vector<SemValue> basis;
};

Probes plan_probes(const CompiledProgram& p, const Env& env, const std::string& binder,
                   const SemValue& cotangent, std::size_t trunc) {
  if (!(env.ctx == p.signature))
    throw ShapeMismatch("environment for " + to_string(env.ctx) + " linked against " +
                        to_string(p.signature));
  check_env(env);
  std::size_t k = p.signature.index_of(binder);
  if (k == 0) throw ShapeMismatch(binder + " is not bound in " + to_string(p.signature));
  if (!p.result.is_base())
    throw ShapeMismatch("gradients need a base-type result, got " + to_string(p.result));
  if (!has_type(cotangent, p.result))
    throw ShapeMismatch("cotangent has type " + to_string(cotangent.type()) + ", expected " +
                        to_string(p.result));
  if (trunc == 0) throw std::invalid_argument("trunc must be at least 1");
  if (!p.slot_is_linear(k - 1))
    throw UnsupportedBinder(binder + " occurs in an iterator step, so the program is not linear in it");

  Probes pr;
  pr.slot = k - 1;
  pr.shape.binder = binder;
  pr.shape.shape = compile_type(p.signature[k - 1].type);
  const SemTy& t = pr.shape.shape;
  if (t.is_base()) {
    std::size_t dim = dense_dim(t, trunc);
    pr.shape.rows = dim;
    pr.shape.cols = 1;
    for (std::size_t j = 0; j < dim; ++j) {
      std::vector<Scalar> e(dim, 0.0);
      e[j] = 1.0;
      pr.basis.push_back(from_dense(t, e));
    }
  } else if (t.domain().is_base() && t.codomain().is_base()) {
    pr.shape.rows = dense_dim(t.codomain(), trunc);
    pr.shape.cols = dense_dim(t.domain(), trunc);
    for (std::size_t r = 0; r < pr.shape.rows; ++r) {
      for (std::size_t c = 0; c < pr.shape.cols; ++c) {
        Matrix m(pr.shape.rows, pr.shape.cols);
        m(r, c) = 1.0;
        pr.basis.push_back(map_from_matrix(t.domain(), t.codomain(), std::move(m)));
      }
    }
  } else {
    throw UnsupportedBinder(binder + " has higher-order type " + to_string(p.signature[k - 1].type));
  }
  pr.shape.values.assign(pr.basis.size(), 0.0);
  return pr;
}

Scalar probe(const CompiledProgram& p, const Env& env, std::size_t slot, const SemValue& value,
             const SemValue& cotangent) {
  std::vector<SemValue> vals = env.values;
  vals[slot] = value;
  return inner(cotangent, p.run(vals));
}

}  // namespace

Gradient grad(const CompiledProgram& p, const Env& env, const std::string& binder,
              const SemValue& cotangent, std::size_t trunc) {
  Probes pr = plan_probes(p, env, binder, cotangent, trunc);
  for (std::size_t j = 0; j < pr.basis.size(); ++j)
    pr.shape.values[j] = probe(p, env, pr.slot, pr.basis[j], cotangent);
  return pr.shape;
}

Gradient grad_parallel(const CompiledProgram& p, const Env& env, const std::string& binder,
                       const SemValue& cotangent, std::size_t trunc) {
  Probes pr = plan_probes(p, env, binder, cotangent, trunc);
  const auto n = static_cast<long>(pr.basis.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < n; ++j) {
    try {
      pr.shape.values[j] = probe(p, env, pr.slot, pr.basis[j], cotangent);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return pr.shape;
}

Scalar fd_check(const CompiledProgram& p, const Env& env, const std::string& binder,
                const SemValue& cotangent, std::size_t trunc, Scalar h) {
  if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
  Probes pr = plan_probes(p, env, binder, cotangent, trunc);
  Gradient g = grad(p, env, binder, cotangent, trunc);
  const SemValue& x = env.values[pr.slot];
  std::vector<Scalar> coords;
  if (x.type().is_base()) coords = to_dense(x, pr.basis.size());
  Scalar worst = 0;
  for (std::size_t j = 0; j < pr.basis.size(); ++j) {
    // Steps rounded so that x +- step is exact in the probed coordinate.
    Scalar hu = h, hd = h;
    if (!coords.empty()) {
      hu = (coords[j] + h) - coords[j];
      hd = coords[j] - (coords[j] - h);
    }
    Scalar up = probe(p, env, pr.slot, axpby(1.0, x, hu, pr.basis[j]), cotangent);
    Scalar down = probe(p, env, pr.slot, axpby(1.0, x, -hd, pr.basis[j]), cotangent);
    Scalar fd = (up - down) / (hu + hd);
    Scalar a = g.values[j];
    worst = std::max(worst, std::abs(a - fd) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

TrainResult toy_train(const TrainConfig& cfg) {
  Ctx ctx{{"m", Ty::fn(Ty::boolean(), Ty::boolean())}, {"b", Ty::boolean()}, {"n", Ty::nat()}};
  CompiledProgram p = compile(typecheck(ctx, parse("iter b {y -> m y} n")));
  const std::vector<Vec2> states = unfold(cfg.system, cfg.target_step);
  const Vec2 target = states.back();

  std::vector<Scalar> n = cfg.init;
  if (n.empty()) n.assign(cfg.trunc, 0.0);
  if (n.size() != cfg.trunc) throw ShapeMismatch("initial count vector must have trunc entries");

  Env env{ctx, {map_from_matrix(SemTy::vbool(), SemTy::vbool(), cfg.system.transition),
                cfg.system.init, Seq::dense(n)}};
  TrainResult res;
  for (std::size_t step = 0;; ++step) {
    env.values[2] = Seq::dense(n);
    const Vec2 out = p.run(env.values).as_vec2();
    const Vec2 r{out.a - target.a, out.b - target.b};
    const Scalar loss = r.a * r.a + r.b * r.b;
    res.losses.push_back(loss);
    if (step == cfg.steps || !std::isfinite(loss)) break;
    Gradient g = grad(p, env, "n", Vec2{2 * r.a, 2 * r.b}, cfg.trunc);
    for (std::size_t j = 0; j < n.size(); ++j) n[j] -= cfg.lr * g.values[j];
    if (!std::all_of(n.begin(), n.end(), [](Scalar c) { return std::isfinite(c); })) {
      res.losses.push_back(INFINITY);
      break;
    }
  }
  res.counts = n;
  res.argmax = static_cast<std::size_t>(std::max_element(n.begin(), n.end()) - n.begin());
  return res;
}

}  // namespace cajal
