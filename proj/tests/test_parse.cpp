#include <doctest.h>

#include "ocnoether/parse.hpp"
#include "ocnoether/simplify.hpp"

using namespace ocnoether;

namespace {
const VarAlphabet kAb = VarAlphabet::canonical(1, 1);
}

TEST_CASE("grammar structure: products, differences, powers") {
  Expr e = parse("psi1*u1 - u1^2", kAb);
  REQUIRE(e->op == ExprOp::sub);
  CHECK(e->a->op == ExprOp::mul);
  CHECK(e->a->a->var_name == "psi1");
  CHECK(e->a->b->var_name == "u1");
  CHECK(e->b->op == ExprOp::pow);
  CHECK(e->b->a->var_name == "u1");
  CHECK(e->b->b->num.as_integer() == 2);
}

TEST_CASE("singular-integrand Lagrangian text parses with two top-level summands") {
  Expr e = parse("(x1^3 - t^2)^2 * u1^14 + 0.001*u1^2", kAb);
  REQUIRE(e->op == ExprOp::add);
  CHECK(e->a->op == ExprOp::mul);
  CHECK(e->a->a->op == ExprOp::pow);
  CHECK(e->b->op == ExprOp::mul);
}

TEST_CASE("variables outside the alphabet are rejected by name") {
  try {
    parse("x2 + 1", kAb);
    FAIL("expected unknown-variable error");
  } catch (const UnknownVariableError& err) {
    CHECK(err.name() == "x2");
  }
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("x1 + ", kAb);
    FAIL("expected syntax error");
  } catch (const ParseError& err) {
    CHECK(err.position() == 5);
  }
  CHECK_THROWS_AS(parse("x1 + + u1", kAb), ParseError);
  CHECK_THROWS_AS(parse("(x1", kAb), ParseError);
  CHECK_THROWS_AS(parse("x1 u1", kAb), ParseError);  // no implicit multiplication
  CHECK_THROWS_AS(parse("foo(x1)", kAb), ParseError);
}

TEST_CASE("precedence: ^ over unary minus over * over +, ^ right-associative") {
  CHECK(parse("2^3^2", kAb)->num.as_integer() == 512);
  CHECK(parse("-2^2", kAb)->num.as_integer() == -4);
  CHECK(parse("(-2)^2", kAb)->num.as_integer() == 4);
  CHECK(parse("2-3-4", kAb)->num.as_integer() == -5);
  CHECK(parse("2*3+4*5", kAb)->num.as_integer() == 26);
  CHECK(parse("2+3*4^2", kAb)->num.as_integer() == 50);
  CHECK(parse("2^-2", kAb)->num.value() == doctest::Approx(0.25));
}

TEST_CASE("literal constants fold exactly") {
  Expr e = parse("1/3 + 1/6", kAb);
  REQUIRE(e->op == ExprOp::number);
  CHECK(e->num.exact());
  CHECK(e->num.rat().str() == "1/2");

  Expr frac = parse("0.125", kAb);
  CHECK(frac->num.exact());
  CHECK(frac->num.rat().str() == "1/8");

  Expr sci = parse("2.5e-3", kAb);
  CHECK(sci->num.exact());
  CHECK(sci->num.rat().str() == "1/400");

  // beyond the exactness window: falls back to double with the same value
  Expr big = parse("123456789123456789123", kAb);
  CHECK(!big->num.exact());
  CHECK(big->num.value() == doctest::Approx(1.23456789123456789123e20));
}

TEST_CASE("division by a literal zero is rejected at fold time") {
  CHECK_THROWS_AS(parse("1/0", kAb), SimplifyError);
}

TEST_CASE("function calls parse and fold exact special values") {
  Expr e = parse("sin(t)", kAb);
  REQUIRE(e->op == ExprOp::call);
  CHECK(e->fn == Builtin::sin);

  CHECK(parse("cos(0)", kAb)->num.as_integer() == 1);
  CHECK(parse("sqrt(9/4)", kAb)->num.rat().str() == "3/2");
  CHECK(parse("exp(0)", kAb)->num.as_integer() == 1);
  CHECK(parse("abs(-7)", kAb)->num.as_integer() == 7);
}

TEST_CASE("identifier 'e' cases: exponent marker vs variable") {
  VarAlphabet withe({"e", "t"});
  CHECK(parse("2e3", withe)->num.as_integer() == 2000);
  Expr prod = parse("2*e", withe);
  REQUIRE(prod->op == ExprOp::mul);
  CHECK(prod->b->var_name == "e");
}

TEST_CASE("whitespace is insignificant") {
  Expr a = parse("t +  u1 * x1", kAb);
  Expr b = parse("t+u1*x1", kAb);
  CHECK(structural_equal(a, b));
}
