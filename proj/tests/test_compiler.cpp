#include "doctest.h"

#include <random>

#include "cajal/compiler.hpp"
#include "cajal/eval.hpp"
#include "cajal/parser.hpp"

using namespace cajal;

namespace {

CompiledProgram compile_src(const Ctx& ctx, const char* src) {
  return compile(typecheck(ctx, parse(src)));
}

SemValue closed(const char* src) { return link(compile_src({}, src), unit_env()); }

}  // namespace

TEST_CASE("restrict") {
  Ctx xy{{"x", Ty::boolean()}, {"y", Ty::nat()}};
  Env env{xy, {Vec2{1, 2}, Seq::one_hot(0)}};
  Env r = restrict(env, {{"y", Ty::nat()}});
  REQUIRE(r.values.size() == 1);
  CHECK(exactly_equal(r.values[0], Seq::one_hot(0)));
  Env same = restrict(Env{{{"y", Ty::nat()}}, {Seq::one_hot(0)}}, {{"y", Ty::nat()}});
  CHECK(exactly_equal(same.values[0], Seq::one_hot(0)));
  CHECK(restrict(env, Ctx{}).values.empty());
  Env swapped = restrict(env, {{"y", Ty::nat()}, {"x", Ty::boolean()}});
  CHECK(exactly_equal(swapped.values[1], Vec2{1, 2}));
  CHECK_THROWS_AS(restrict(env, {{"z", Ty::nat()}}), NotASubcontext);
  CHECK_THROWS_AS(restrict(env, {{"x", Ty::nat()}}), NotASubcontext);
}

TEST_CASE("worked compilation fixtures") {
  CHECK(exactly_equal(closed("succ (succ 0)"), Seq::one_hot(2)));

  auto shift = compile_src({{"x", Ty::nat()}}, "succ x");
  SemValue out = link(shift, {shift.signature, {Seq::dense({10, 20, 30})}});
  CHECK(exactly_equal(out, Seq::dense({0, 10, 20, 30})));

  auto neg = compile_src({{"x", Ty::boolean()}}, "if x then ff else tt");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int i = 0; i < 100; ++i) {
    double a1 = d(rng), a2 = d(rng);
    SemValue r = link(neg, {neg.signature, {Vec2{a1, a2}}});
    CHECK(approx_equal(r, Vec2{a2, a1}, 0, 1e-12));
  }

  CHECK(exactly_equal(closed("iter tt {x -> if x then ff else tt} 2"), Vec2{1, 0}));

  auto app = compile_src({{"y", Ty::nat()}}, "(\\x:Nat. succ x) y");
  SemValue y = Seq::from_terms({{0, 1.5}, {3, -2.0}});
  CHECK(exactly_equal(link(app, {app.signature, {y}}), y.as_seq().shifted()));
}

TEST_CASE("link checks shapes and finiteness") {
  auto neg = compile_src({{"x", Ty::boolean()}}, "if x then ff else tt");
  CHECK(exactly_equal(link(neg, {neg.signature, {Vec2{1, 0}}}), Vec2{0, 1}));
  CHECK(exactly_equal(link(neg, {neg.signature, {Vec2{0, 1}}}), Vec2{1, 0}));
  CHECK_THROWS_AS(link(neg, {neg.signature, {Seq{}}}), ShapeMismatch);
  CHECK_THROWS_AS(link(neg, unit_env()), ShapeMismatch);
  CHECK_THROWS_AS(link(neg, {neg.signature, {Vec2{std::nan(""), 0}}}), NonFiniteError);
}

TEST_CASE("matrix extraction") {
  auto neg = compile_src({{"x", Ty::boolean()}}, "if x then ff else tt");
  Matrix m = matrix_of(neg, 1);
  CHECK(m.rows == 2);
  CHECK(m.data == std::vector<Scalar>{0, 1, 1, 0});

  auto shift = compile_src({{"x", Ty::nat()}}, "succ x");
  Matrix s = matrix_of(shift, 4);
  CHECK(s.data == std::vector<Scalar>{0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0});

  auto id = compile_src({{"x", Ty::boolean()}}, "x");
  CHECK(matrix_of(id, 3).data == std::vector<Scalar>{1, 0, 0, 1});

  auto closed_not = compile_src({}, "\\x:Bool. if x then ff else tt");
  CHECK(matrix_of(closed_not, 2).data == std::vector<Scalar>{0, 1, 1, 0});

  auto two = compile_src({{"x", Ty::boolean()}, {"y", Ty::boolean()}}, "if x then y else y");
  CHECK_THROWS_AS(matrix_of(two, 2), UnsupportedSignature);
  auto ho = compile_src({{"f", Ty::fn(Ty::boolean(), Ty::boolean())}}, "f tt");
  CHECK_THROWS_AS(matrix_of(ho, 2), UnsupportedSignature);
  CHECK_THROWS_AS(matrix_of(id, 0), std::invalid_argument);
}

TEST_CASE("parallel matrix extraction matches serial") {
  auto p = compile_src({{"n", Ty::nat()}}, "iter 1 {y -> succ (succ y)} n");
  for (std::size_t t : {1u, 5u, 17u}) {
    CHECK(matrix_of(p, t).data == matrix_of_parallel(p, t).data);
  }
}

TEST_CASE("soft iteration sums over the count support") {
  auto p = compile_src({{"n", Ty::nat()}}, "iter tt {y -> if y then ff else tt} n");
  SemValue r = link(p, {p.signature, {Seq::dense({7, 8, 9})}});
  CHECK(exactly_equal(r, Vec2{16, 8}));
  CHECK(exactly_equal(link(p, {p.signature, {Seq{}}}), Vec2{0, 0}));
}

TEST_CASE("iterator agrees with power_apply on numerals") {
  const char* bases[] = {"tt", "ff"};
  for (const char* b : bases) {
    for (std::size_t k = 0; k <= 10; ++k) {
      std::string src = std::string("iter ") + b + " {y -> if y then ff else tt} " +
                        std::to_string(k);
      SemValue lhs = closed(src.c_str());
      SemValue step = closed("\\y:Bool. if y then ff else tt");
      SemValue rhs = power_apply(step.as_map(), k, closed(b));
      CHECK(approx_equal(lhs, rhs));
    }
  }
  for (std::size_t k = 0; k <= 10; ++k) {
    std::string src = "iter 1 {y -> succ (succ y)} " + std::to_string(k);
    SemValue step = closed("\\y:Nat. succ (succ y)");
    CHECK(approx_equal(closed(src.c_str()), power_apply(step.as_map(), k, closed("1"))));
  }
}

TEST_CASE("compiled closed programs agree with evaluation") {
  for (const char* src : {"iter 0 {y -> succ (succ y)} (succ 0)",
                          "(\\f:Bool -o Bool. f ff) (\\b:Bool. if b then ff else tt)",
                          "iter tt {y -> if y then ff else tt} (iter 0 {z -> succ z} 3)",
                          "(\\f:Nat -o Nat. iter 1 {y -> f y} 2) (\\n:Nat. iter n {y -> succ y} 2)",
                          "if (\\b:Bool. b) ff then 3 else iter 2 {y -> succ y} 2"}) {
    CAPTURE(src);
    Expr e = parse(src);
    SemValue direct = closed(src);
    SemValue via_value = link(compile(typecheck({}, eval(e))), unit_env());
    CHECK(approx_equal(direct, via_value));
  }
}

TEST_CASE("captured slots are recorded") {
  Ctx ctx{{"x", Ty::boolean()}, {"n", Ty::nat()}};
  auto p = compile_src(ctx, "iter tt {y -> if x then y else y} n");
  CHECK_FALSE(p.slot_is_linear(0));
  CHECK(p.slot_is_linear(1));
  auto q = compile_src({{"f", Ty::fn(Ty::boolean(), Ty::boolean())}},
                       "(\\g:Bool -o Bool. iter tt {y -> g y} 2) f");
  CHECK(q.nested_capture);
  CHECK_FALSE(q.slot_is_linear(0));
}

TEST_CASE("iteration captures make the map polynomial in the captured slot") {
  Ctx ctx{{"x", Ty::boolean()}};
  auto p = compile_src(ctx, "iter tt {y -> if x then y else y} 2");
  SemValue at1 = link(p, {ctx, {Vec2{1, 1}}});
  SemValue at2 = link(p, {ctx, {Vec2{2, 2}}});
  CHECK(exactly_equal(at1, Vec2{4, 0}));
  CHECK(exactly_equal(at2, Vec2{16, 0}));
}
