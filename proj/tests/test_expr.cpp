#include <doctest.h>

#include "ocnoether/expr.hpp"

using namespace ocnoether;

TEST_CASE("rational arithmetic is exact and normalized") {
  auto r = Rational::make(2, 4);
  REQUIRE(r);
  CHECK(r->num() == 1);
  CHECK(r->den() == 2);

  auto neg = Rational::make(1, -2);
  REQUIRE(neg);
  CHECK(neg->num() == -1);
  CHECK(neg->den() == 2);

  CHECK(!Rational::make(1, 0));

  auto sum = Rational::add(Rational(1), *Rational::make(1, 3));
  REQUIRE(sum);
  CHECK(sum->str() == "4/3");

  auto q = Rational::div(Rational(1), Rational(3));
  REQUIRE(q);
  CHECK(q->to_double() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rational overflow is detected, not wrapped") {
  Rational big(INT64_MAX);
  CHECK(!Rational::mul(big, Rational(2)));
  CHECK(!Rational::add(big, big));
  CHECK(Rational::sub(big, big));
}

TEST_CASE("integer powers of rationals, including negative exponents") {
  auto p = Rational(2).pow_int(10);
  REQUIRE(p);
  CHECK(p->num() == 1024);

  auto inv = Rational(2).pow_int(-2);
  REQUIRE(inv);
  CHECK(inv->str() == "1/4");

  CHECK(!Rational(0).pow_int(-1));
  auto r23 = Rational::make(2, 3)->pow_int(3);
  REQUIRE(r23);
  CHECK(r23->str() == "8/27");
}

TEST_CASE("numbers demote to double on overflow and compare by value") {
  Number a = Number::rational(Rational(INT64_MAX));
  Number sum = Number::add(a, a);
  CHECK(!sum.exact());
  CHECK(sum.value() == doctest::Approx(2.0 * static_cast<double>(INT64_MAX)));

  Number exact_half = Number::rational(*Rational::make(1, 2));
  Number real_half = Number::real(0.5);
  CHECK(exact_half.equals(real_half));
  CHECK(Number::integer(3).is_integer());
  CHECK(Number::integer(3).as_integer() == 3);
}

TEST_CASE("structural equality and hashing") {
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  Expr e1 = ab.var("x1") + ab.var("u1") * make_rational(2);
  Expr e2 = ab.var("x1") + ab.var("u1") * make_rational(2);
  CHECK(structural_equal(e1, e2));
  CHECK(e1->hash == e2->hash);

  Expr e3 = ab.var("x1") + make_rational(2) * ab.var("u1");
  CHECK(!structural_equal(e1, e3));
}

TEST_CASE("expression ordering: numbers < variables < compound, stable") {
  VarAlphabet ab = VarAlphabet::canonical(2, 1);
  Expr n = make_rational(5);
  Expr t = ab.var("t");
  Expr x2 = ab.var("x2");
  Expr sum = t + x2;
  CHECK(expr_less(n, t));
  CHECK(expr_less(t, x2));  // alphabet rank order
  CHECK(expr_less(x2, sum));
  CHECK(!expr_less(sum, x2));
  CHECK(!expr_less(t, t));
}

TEST_CASE("canonical alphabet layout and rate extension") {
  VarAlphabet ab = VarAlphabet::canonical(2, 1);
  std::vector<std::string> expect = {"t", "x1", "x2", "u1", "psi1", "psi2", "s"};
  CHECK(ab.names() == expect);
  CHECK(ab.rank_of("psi2") == 5);
  CHECK(ab.rank_of("nope") == -1);
  CHECK_THROWS_AS((void)ab.var("nope"), AlphabetError);

  VarAlphabet rates = ab.with_rates();
  CHECK(rates.contains("x1dot"));
  CHECK(rates.contains("u1dot"));
  CHECK(rates.contains("psi2dot"));
  CHECK(!rates.contains("tdot"));
  CHECK(!rates.contains("sdot"));
  // original ranks are preserved
  CHECK(rates.rank_of("psi2") == 5);
}

TEST_CASE("duplicate names are rejected") {
  CHECK_THROWS_AS(VarAlphabet({"a", "b", "a"}), AlphabetError);
}

TEST_CASE("printer emits reparseable operator precedence") {
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  Expr x = ab.var("x1");
  Expr u = ab.var("u1");
  CHECK(to_string((x + u) * x) == "(x1 + u1)*x1");
  CHECK(to_string(pow(x + u, 2)) == "(x1 + u1)^2");
  CHECK(to_string(pow(x, -2)) == "x1^(-2)");
  CHECK(to_string(x - (u - x)) == "x1 - (u1 - x1)");
  CHECK(to_string(make_call(Builtin::sin, x * u)) == "sin(x1*u1)");
  CHECK(to_string(make_rational(-2, 3) * x) == "-2/3*x1");
  CHECK(to_string(x * make_rational(-2, 3)) == "x1*(-2/3)");
}
