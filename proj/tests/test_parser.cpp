#include "doctest.h"
#include "nfold/parser.hpp"

using namespace nfold;

TEST_CASE("precedence and unary minus") {
  const Expr q = Expr::var();
  CHECK(parse("-q^2").same(-pow(q, 2)));
  CHECK(parse("2^-1").is_constant(0.5));
  CHECK(parse("1 + 2*q^3/4").same(1.0 + 0.5 * pow(q, 3)));
  CHECK(parse("2.5e-1 * q").same(0.25 * q));
}

TEST_CASE("builtins, constants and bindings") {
  ParseContext ctx;
  ctx.bindings.emplace("omega", Expr(2.0));
  CHECK(std::abs(eval(parse("omega*sin(pi/2) + i", ctx), 0.0) - cplx(2.0, 1.0)) < 1e-15);
  CHECK(std::abs(eval(parse("Int(2*q)"), 3.0) - 9.0) < 1e-14);
  CHECK(std::abs(eval(parse("Int(2*q, 1)"), 3.0) - 8.0) < 1e-14);
}

TEST_CASE("alternate variable name") {
  ParseContext ctx;
  ctx.variable = "x";
  CHECK(parse("x^2", ctx).same(pow(Expr::var(), 2)));
  CHECK_THROWS_AS(parse("q", ctx), ParseError);
}

TEST_CASE("errors carry positions") {
  try {
    parse("1 + foo");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(parse("sin(q"), ParseError);
  CHECK_THROWS_AS(parse("q/0"), ParseError);
  CHECK_THROWS_AS(parse("bogus(q)"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("q q"), ParseError);
}
