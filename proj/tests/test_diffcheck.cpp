#include "doctest.h"

#include <cmath>
#include <random>

#include "cajal/diffcheck.hpp"
#include "cajal/parser.hpp"

using namespace cajal;

namespace {

bool same(const Vec2& u, const Vec2& v) { return u.a == v.a && u.b == v.b; }

CompiledProgram compile_src(const Ctx& ctx, const char* src) {
  return compile(typecheck(ctx, parse(src)));
}

DynSystem not_system() {
  DynSystem s;
  s.transition(0, 1) = 1;
  s.transition(1, 0) = 1;
  return s;
}

}  // namespace

TEST_CASE("unfold") {
  auto st = unfold(two_neuron_system(), 3);
  REQUIRE(st.size() == 4);
  CHECK(same(st[0], {1, 0}));
  CHECK(same(st[1], {0, 3}));
  CHECK(same(st[2], {6, 0}));
  CHECK(same(st[3], {0, 18}));
  CHECK(unfold(two_neuron_system(), 0).size() == 1);
  DynSystem id;
  id.init = {2, 5};
  id.transition(0, 0) = id.transition(1, 1) = 1;
  for (const Vec2& v : unfold(id, 2)) CHECK(same(v, {2, 5}));
}

TEST_CASE("restricted g") {
  DynSystem s = two_neuron_system();
  CHECK(same(g_restricted(s, {7, 8, 9}), {61, 24}));
  CHECK(same(g_restricted(s, {1, 0, 0}), {1, 0}));
  CHECK(same(g_restricted(s, {0, 1, 0}), {0, 3}));
  CHECK(same(g_restricted(s, {0, 0, 1}), {6, 0}));
  CHECK(same(g_restricted(s, {}), {0, 0}));
}

TEST_CASE("restricted g on one-hots equals the unfolded states") {
  DynSystem s = two_neuron_system();
  auto st = unfold(s, 8);
  for (std::size_t i = 0; i <= 8; ++i) {
    std::vector<Scalar> x(i + 1, 0.0);
    x[i] = 1;
    CHECK(same(g_restricted(s, x), st[i]));
  }
}

TEST_CASE("restricted g is linear") {
  DynSystem s = two_neuron_system();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<Scalar> x(5), y(5), z(5);
    double a = d(rng), b = d(rng);
    for (int i = 0; i < 5; ++i) {
      x[i] = d(rng);
      y[i] = d(rng);
      z[i] = a * x[i] + b * y[i];
    }
    Vec2 gx = g_restricted(s, x), gy = g_restricted(s, y), gz = g_restricted(s, z);
    CHECK(std::abs(gz.a - (a * gx.a + b * gy.a)) <= 1e-12 * std::max(1.0, std::abs(gz.a)));
    CHECK(std::abs(gz.b - (a * gx.b + b * gy.b)) <= 1e-12 * std::max(1.0, std::abs(gz.b)));
  }
}

TEST_CASE("restricted g agrees with the compiled iterated not") {
  Ctx ctx{{"n", Ty::nat()}};
  auto p = compile_src(ctx, "iter tt {y -> if y then ff else tt} n");
  DynSystem s = not_system();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<Scalar> x(1 + t % 6);
    for (auto& c : x) c = d(rng);
    Vec2 compiled = link(p, {ctx, {Seq::dense(x)}}).as_vec2();
    Vec2 g = g_restricted(s, x);
    CHECK(approx_equal(compiled.a, g.a));
    CHECK(approx_equal(compiled.b, g.b));
  }
}

TEST_CASE("gradient fixtures") {
  Ctx bx{{"x", Ty::boolean()}};
  auto neg = compile_src(bx, "if x then ff else tt");
  Gradient g = grad(neg, {bx, {Vec2{0.3, -1.2}}}, "x", Vec2{1, 0});
  CHECK(g.values == std::vector<Scalar>{0, 1});

  auto id = compile_src(bx, "x");
  CHECK(grad(id, {bx, {Vec2{4, 4}}}, "x", Vec2{2.5, -7}).values == std::vector<Scalar>{2.5, -7});

  Ctx nx{{"n", Ty::nat()}};
  auto it = compile_src(nx, "iter tt {y -> if y then ff else tt} n");
  Gradient gn = grad(it, {nx, {Seq::one_hot(1)}}, "n", Vec2{1, 0}, 4);
  CHECK(gn.values == std::vector<Scalar>{1, 0, 1, 0});
  CHECK(gn.rows == 4);
}

TEST_CASE("gradient with respect to a matrix binder") {
  Ctx ctx{{"m", Ty::fn(Ty::boolean(), Ty::boolean())}, {"x", Ty::boolean()}};
  auto p = compile_src(ctx, "m x");
  Matrix a(2, 2);
  a.data = {1, 2, 3, 4};
  Env env{ctx, {map_from_matrix(SemTy::vbool(), SemTy::vbool(), a), Vec2{5, 7}}};
  Gradient g = grad(p, env, "m", Vec2{1, -1});
  CHECK(g.rows == 2);
  CHECK(g.cols == 2);
  CHECK(g.values == std::vector<Scalar>{5, 7, -5, -7});
  CHECK(fd_check(p, env, "m", Vec2{1, -1}) <= 1e-5);
}

TEST_CASE("gradient refusals") {
  Ctx ctx{{"x", Ty::boolean()}, {"n", Ty::nat()}};
  auto p = compile_src(ctx, "iter tt {y -> if x then y else y} n");
  Env env{ctx, {Vec2{1, 0}, Seq::one_hot(2)}};
  CHECK_THROWS_AS(grad(p, env, "x", Vec2{1, 0}), UnsupportedBinder);
  CHECK_NOTHROW(grad(p, env, "n", Vec2{1, 0}));
  CHECK_THROWS_AS(grad(p, env, "z", Vec2{1, 0}), ShapeMismatch);
  CHECK_THROWS_AS(grad(p, env, "n", Seq{}), ShapeMismatch);

  Ctx ho{{"f", Ty::fn(Ty::fn(Ty::boolean(), Ty::boolean()), Ty::boolean())}};
  auto q = compile_src(ho, "f (\\b:Bool. b)");
  SemTy bb = SemTy::vfn(SemTy::vbool(), SemTy::vbool());
  Env qenv{ho, {LinearMap(bb, SemTy::vbool(), [](const SemValue& g) {
                  return g.as_map()(Vec2{1, 0});
                })}};
  CHECK_THROWS_AS(grad(q, qenv, "f", Vec2{1, 0}), UnsupportedBinder);
}

TEST_CASE("finite differences") {
  Ctx ctx{{"c", Ty::boolean()}, {"n", Ty::nat()}};
  auto p = compile_src(ctx, "if c then succ n else iter n {y -> succ y} 2");
  Env env{ctx, {Vec2{0.4, 1.7}, Seq::dense({1, -2, 0.5})}};
  SemValue cot = Seq::dense({0.5, 1, -1, 2, 3});
  CHECK(fd_check(p, env, "c", cot, 6) <= 1e-5);
  CHECK(fd_check(p, env, "n", cot, 6) <= 1e-5);
  CHECK(fd_check(p, env, "n", Seq{}, 6) == 0);
  Ctx bx{{"x", Ty::boolean()}};
  auto id = compile_src(bx, "x");
  CHECK(fd_check(id, {bx, {Vec2{3, -1}}}, "x", Vec2{1, 2}) <= 1e-12);
  CHECK_THROWS_AS(fd_check(id, {bx, {Vec2{3, -1}}}, "x", Vec2{1, 2}, 10, 0.0),
                  std::invalid_argument);
}

TEST_CASE("parallel gradients match serial") {
  Ctx ctx{{"c", Ty::boolean()}, {"n", Ty::nat()}};
  auto p = compile_src(ctx, "if c then succ n else iter n {y -> succ y} 2");
  Env env{ctx, {Vec2{0.4, 1.7}, Seq::dense({1, -2, 0.5})}};
  SemValue cot = Seq::dense({0.5, 1, -1, 2, 3});
  CHECK(grad(p, env, "n", cot, 12).values == grad_parallel(p, env, "n", cot, 12).values);
}

TEST_CASE("toy training fixtures") {
  TrainConfig at0;
  at0.target_step = 0;
  at0.init.assign(10, 0.0);
  at0.init[0] = 1;
  at0.steps = 3;
  CHECK(toy_train(at0).losses.front() == 0);

  TrainConfig frozen;
  frozen.lr = 0;
  frozen.steps = 20;
  TrainResult r = toy_train(frozen);
  REQUIRE(r.losses.size() == 21);
  CHECK(r.losses.front() == 36);
  CHECK(r.final_loss() == 36);
}

TEST_CASE("toy training at a stable step size reaches the least-norm fit") {
  TrainConfig cfg;
  cfg.lr = 5e-8;
  cfg.steps = 5000;
  TrainResult r = toy_train(cfg);
  CHECK(r.final_loss() < 1e-3);
  // f(j) for even j is (6^(j/2), 0); gradient descent from zero converges to
  // the least-norm solution, which is proportional to those first coordinates.
  double norm2 = 0;
  for (int j = 0; j < 10; j += 2) norm2 += std::pow(36.0, j / 2);
  for (std::size_t j = 0; j < 10; ++j) {
    double expect = j % 2 == 0 ? 6 * std::pow(6.0, j / 2) / norm2 : 0;
    CHECK(std::abs(r.counts[j] - expect) < 1e-6);
  }
  CHECK(r.argmax == 8);
}

TEST_CASE("toy training at the prescribed step size diverges") {
  TrainResult r = toy_train(TrainConfig{});
  CHECK(r.losses.size() < 5002);
  CHECK_FALSE(std::isfinite(r.final_loss()));
}
