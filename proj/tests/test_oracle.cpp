#include "doctest.h"

#include "cajal/parser.hpp"
#include "support/oracle.hpp"

using namespace cajal;

TEST_CASE("declarative search fixtures") {
  auto ts = oracle::declarative_types({}, parse("\\x:Bool. if x then tt else tt"));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0] == Ty::fn(Ty::boolean(), Ty::boolean()));
  CHECK(oracle::declarative_types({}, parse("\\x:Bool. if x then tt else x")).empty());
  CHECK(oracle::declarative_types({{"x", Ty::boolean()}}, parse("tt")).empty());
  auto n = oracle::declarative_types({}, parse("iter 0 {y -> succ (succ y)} (succ 0)"));
  REQUIRE(n.size() == 1);
  CHECK(n[0] == Ty::nat());
  Ctx ab{{"a", Ty::boolean()}, {"b", Ty::boolean()}};
  CHECK(oracle::declarative_types(ab, parse("if a then b else b")).size() == 1);
  CHECK(oracle::declarative_types(ab, parse("if tt then a else b")).empty());
}

TEST_CASE("enumeration respects its bounds") {
  oracle::EnumConfig cfg;
  cfg.max_depth = 3;
  cfg.max_size = 4;
  std::size_t n = 0;
  oracle::enumerate({{"p", Ty::nat()}}, cfg, [&](const Expr& e) {
    ++n;
    CHECK(depth(e) <= 3);
    CHECK(size(e) <= 4);
  });
  CHECK(n > 100);
  CHECK(oracle::small_contexts().size() == 13);
}

TEST_CASE("algorithmic and declarative typing agree on small programs") {
  oracle::EnumConfig cfg;
  cfg.max_size = 5;
  std::size_t total = 0, accepted = 0, disagreements = 0;
  for (const Ctx& ctx : oracle::small_contexts()) {
    oracle::enumerate(ctx, cfg, [&](const Expr& raw) {
      Expr e = alpha_rename(raw, ctx.names());
      ++total;
      auto decl = oracle::declarative_types(ctx, e);
      auto alg = try_typecheck(ctx, e);
      const Derivation* d = std::get_if<Derivation>(&alg);
      if (d) ++accepted;
      bool agree = d ? (decl.size() == 1 && decl[0] == d->type && validate(*d)) : decl.empty();
      if (!agree) {
        ++disagreements;
        MESSAGE(to_string(ctx) << " |- " << pretty(e));
      }
    });
  }
  CHECK(disagreements == 0);
  CHECK(accepted > 100);
  CHECK(total > 100000);
}
