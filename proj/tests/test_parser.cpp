#include "doctest.h"

#include "cajal/parser.hpp"

using namespace cajal;

TEST_CASE("parse constants and numerals") {
  CHECK(parse("tt").is<True>());
  CHECK(parse("ff").is<False>());
  CHECK(as_numeral(parse("0")) == 0u);
  CHECK(as_numeral(parse("3")) == 3u);
  CHECK(as_numeral(parse("succ (succ 0)")) == 2u);
  CHECK(as_numeral(parse("succ succ 0")) == 2u);
  CHECK(structurally_equal(parse("iter 0 {y -> succ succ y} 1"), parse("iter 0 {y -> succ (succ y)} 1")));
}

TEST_CASE("parse iteration") {
  Expr e = parse("iter 0 {y -> succ (succ y)} (succ 0)");
  const Iter* it = e.as<Iter>();
  REQUIRE(it != nullptr);
  CHECK(as_numeral(it->base) == 0u);
  CHECK(as_numeral(it->count) == 1u);
  CHECK(it->step.is<Succ>());
}

TEST_CASE("application is left associative") {
  Expr e = parse("f a b");
  const App* outer = e.as<App>();
  REQUIRE(outer);
  CHECK(outer->arg.as<Var>()->name == "b");
  CHECK(outer->fun.is<App>());
}

TEST_CASE("lambda body extends to the right") {
  Expr e = parse("\\x:Bool -o Bool. x tt");
  const Lam* l = e.as<Lam>();
  REQUIRE(l);
  CHECK(l->annotation == Ty::fn(Ty::boolean(), Ty::boolean()));
  CHECK(l->body.is<App>());
}

TEST_CASE("comments and whitespace") {
  Expr e = parse("-- the not function\n\\x:Bool.\n  if x then ff else tt -- done\n");
  CHECK(e.is<Lam>());
}

TEST_CASE("pretty round trip") {
  for (const char* src : {"\\x:Bool. if x then ff else tt", "iter tt {y -> if y then ff else tt} 2",
                          "(\\x:Nat. succ x) y", "\\f:Bool -o Bool. \\b:Bool. f (f b)",
                          "\\f:(Bool -o Bool) -o Nat. f (\\b:Bool. b)", "succ 4",
                          "if (\\b:Bool. b) tt then 0 else 1"}) {
    CAPTURE(src);
    Expr e = parse(src);
    CHECK(alpha_equivalent(parse(pretty(e)), e));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("\\x:Bool. if x then tt");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 1);
    CHECK(err.column() > 1);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("(tt"), ParseError);
  CHECK_THROWS_AS(parse("tt )"), ParseError);
  CHECK_THROWS_AS(parse("\\x. x"), ParseError);
  CHECK_THROWS_AS(parse("iter tt {y y} 2"), ParseError);
  CHECK_THROWS_AS(parse_type("Bool -o"), ParseError);
  CHECK_THROWS_AS(parse("#"), ParseError);
}

TEST_CASE("error on second line") {
  try {
    parse("tt\n  )");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
    CHECK(err.column() == 3);
  }
}

TEST_CASE("parsed binders are unique") {
  Expr e = parse("(\\x:Bool. x) ((\\x:Bool. x) tt)");
  auto bs = binders(e);
  CHECK(std::set<std::string>(bs.begin(), bs.end()).size() == 2);
}
