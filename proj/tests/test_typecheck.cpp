#include "doctest.h"

#include <algorithm>

#include "cajal/parser.hpp"
#include "cajal/typecheck.hpp"

using namespace cajal;

namespace {

Ty bb() { return Ty::fn(Ty::boolean(), Ty::boolean()); }

TypeError::Kind error_of(const Ctx& ctx, const char* src) {
  try {
    typecheck(ctx, parse(src));
  } catch (const TypeError& e) {
    return e.kind();
  }
  FAIL("expected a type error for " << src);
  return TypeError::Kind::Mismatch;
}

}  // namespace

TEST_CASE("split_ok") {
  Ctx xyz{{"x", Ty::boolean()}, {"y", Ty::boolean()}, {"z", Ty::boolean()}};
  std::vector<Ctx> good{{{"x", Ty::boolean()}, {"y", Ty::boolean()}}, {{"z", Ty::boolean()}}};
  CHECK(split_ok(xyz, good));
  Ctx xy{{"x", Ty::boolean()}, {"y", Ty::boolean()}};
  std::vector<Ctx> overlap{xy, {{"y", Ty::boolean()}}};
  CHECK_FALSE(split_ok(xy, overlap));
  std::vector<Ctx> empties{Ctx{}, Ctx{}};
  CHECK(split_ok(Ctx{}, empties));
  std::vector<Ctx> missing{{{"x", Ty::boolean()}}};
  CHECK_FALSE(split_ok(xy, missing));
  std::vector<Ctx> retyped{{{"x", Ty::nat()}}, {{"y", Ty::boolean()}}};
  CHECK_FALSE(split_ok(xy, retyped));
  std::vector<Ctx> reordered{{{"y", Ty::boolean()}}, {{"x", Ty::boolean()}}};
  CHECK(split_ok(xy, reordered));
}

TEST_CASE("linear if accepted") {
  Derivation d = typecheck({}, parse("\\x:Bool. if x then tt else tt"));
  CHECK(d.type == bb());
  CHECK(validate(d));
}

TEST_CASE("nonlinear if rejected with the duplicated variable") {
  try {
    typecheck({}, parse("\\x:Bool. if x then tt else x"));
    FAIL("accepted a nonlinear program");
  } catch (const TypeError& e) {
    CHECK(e.kind() == TypeError::Kind::NonlinearUse);
    CHECK(e.name() == "x");
    CHECK(e.count() == 2);
  }
}

TEST_CASE("doubling iterator") {
  Derivation d = typecheck({}, parse("iter 0 {y -> succ (succ y)} (succ 0)"));
  CHECK(d.type == Ty::nat());
  CHECK(d.rule == Rule::Iter);
  CHECK(validate(d));
}

TEST_CASE("weakening forbidden") {
  try {
    typecheck({{"x", Ty::boolean()}}, parse("tt"));
    FAIL("accepted an unused variable");
  } catch (const TypeError& e) {
    CHECK(e.kind() == TypeError::Kind::UnusedVariable);
    CHECK(e.name() == "x");
  }
  CHECK(error_of({}, "\\x:Bool. tt") == TypeError::Kind::UnusedVariable);
  CHECK(error_of({}, "iter tt {y -> tt} 2") == TypeError::Kind::UnusedVariable);
}

TEST_CASE("error kinds") {
  CHECK(error_of({}, "x") == TypeError::Kind::UnboundVariable);
  CHECK(error_of({}, "succ tt") == TypeError::Kind::Mismatch);
  CHECK(error_of({}, "tt ff") == TypeError::Kind::NotAFunction);
  CHECK(error_of({}, "(\\x:Bool. x) 0") == TypeError::Kind::Mismatch);
  CHECK(error_of({}, "if 0 then tt else ff") == TypeError::Kind::Mismatch);
  CHECK(error_of({}, "if tt then tt else 0") == TypeError::Kind::Mismatch);
  CHECK(error_of({}, "iter tt {y -> y} ff") == TypeError::Kind::CountNotNat);
  CHECK(error_of({}, "iter tt {y -> succ y} 2") == TypeError::Kind::Mismatch);
  CHECK(error_of({{"a", Ty::boolean()}, {"b", Ty::boolean()}}, "if tt then a else b") ==
        TypeError::Kind::BranchContextMismatch);
  CHECK(error_of({{"f", bb()}}, "\\b:Bool. f (f b)") == TypeError::Kind::NonlinearUse);
}

TEST_CASE("splits follow free variables") {
  Ctx ctx{{"f", bb()}, {"b", Ty::boolean()}};
  Derivation d = typecheck(ctx, parse("f b"));
  REQUIRE(d.rule == Rule::App);
  CHECK(d.split[0] == Ctx{{"f", bb()}});
  CHECK(d.split[1] == Ctx{{"b", Ty::boolean()}});
  CHECK(validate(d));
}

TEST_CASE("if branches share their context") {
  Ctx ctx{{"c", Ty::boolean()}, {"a", Ty::nat()}};
  Derivation d = typecheck(ctx, parse("if c then succ a else a"));
  REQUIRE(d.rule == Rule::If);
  CHECK(d.children[1].ctx == d.children[2].ctx);
  CHECK(d.children[1].ctx == Ctx{{"a", Ty::nat()}});
  CHECK(validate(d));
}

TEST_CASE("iter step context is the split extended by the binder") {
  Ctx ctx{{"x", Ty::boolean()}, {"n", Ty::nat()}};
  Derivation d = typecheck(ctx, parse("iter tt {y -> if x then y else y} n"));
  REQUIRE(d.rule == Rule::Iter);
  CHECK(d.split[0].empty());
  CHECK(d.split[1] == Ctx{{"x", Ty::boolean()}});
  CHECK(d.split[2] == Ctx{{"n", Ty::nat()}});
  CHECK(d.children[1].ctx.length() == 2);
  CHECK(validate(d));
}

TEST_CASE("validate rejects tampered derivations") {
  Ctx ctx{{"c", Ty::boolean()}, {"a", Ty::nat()}};
  Derivation d = typecheck(ctx, parse("if c then a else a"));
  Derivation bad = d;
  bad.children[2].ctx = Ctx{};
  CHECK_FALSE(validate(bad));

  Derivation v = typecheck({{"x", Ty::boolean()}}, parse("x"));
  v.ctx = Ctx{{"x", Ty::boolean()}, {"y", Ty::boolean()}};
  CHECK_FALSE(validate(v));

  Derivation c = typecheck({}, parse("tt"));
  c.ctx = Ctx{{"x", Ty::boolean()}};
  CHECK_FALSE(validate(c));

  Derivation t = typecheck({}, parse("succ 0"));
  t.type = Ty::boolean();
  CHECK_FALSE(validate(t));
}

TEST_CASE("exchange: permuted contexts give the same type") {
  Ctx ctx{{"f", bb()}, {"b", Ty::boolean()}, {"n", Ty::nat()}};
  Expr e = parse("iter (f b) {y -> if y then ff else tt} n");
  Ty t = typecheck(ctx, e).type;
  std::vector<Binding> bs = ctx.binders();
  std::sort(bs.begin(), bs.end(), [](auto& a, auto& b) { return a.name < b.name; });
  do {
    Derivation d = typecheck(Ctx(bs), e);
    CHECK(d.type == t);
    CHECK(validate(d));
  } while (std::next_permutation(bs.begin(), bs.end(),
                                 [](auto& a, auto& b) { return a.name < b.name; }));
}

TEST_CASE("rendering and histogram") {
  Derivation d = typecheck({}, parse("(\\x:Bool. if x then ff else tt) tt"));
  std::string r = render(d);
  CHECK(r.find("[App]") != std::string::npos);
  CHECK(r.find("[If]") != std::string::npos);
  auto h = rule_histogram(d);
  CHECK(h[static_cast<int>(Rule::True)] == 2);
  CHECK(h[static_cast<int>(Rule::False)] == 1);
  CHECK(h[static_cast<int>(Rule::Var)] == 1);
  CHECK(std::string(rule_name(Rule::Iter)) == "Iter");
}

TEST_CASE("accepted derivations use every context variable exactly once") {
  Ctx ctx{{"f", Ty::fn(Ty::nat(), Ty::nat())}, {"m", Ty::nat()}, {"c", Ty::boolean()}};
  Expr e = parse("if c then f m else f (succ m)");
  Derivation d = typecheck(ctx, e);
  for (const auto& b : ctx.binders()) CHECK(count_free(e, b.name) >= 1);
  CHECK(validate(d));
}
