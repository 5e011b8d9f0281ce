#include <doctest.h>

#include <cmath>
#include <random>

#include "ocnoether/calculus.hpp"
#include "ocnoether/parse.hpp"
#include "ocnoether/simplify.hpp"

using namespace ocnoether;

namespace {

const VarAlphabet kAb = VarAlphabet::canonical(1, 1);

Expr P(const std::string& text) { return parse(text, kAb); }

}  // namespace

TEST_CASE("partial derivatives: power, product, chain rules") {
  Expr d = differentiate(P("(x1^3 - t^2)^2"), "x1");
  CHECK(structural_equal(d, simplify(P("6*x1^5 - 6*x1^2*t^2"))));

  Expr du = differentiate(P("-u1^2 + psi1*u1"), "u1");
  CHECK(structural_equal(du, simplify(P("-2*u1 + psi1"))));

  // partial, not total: states are independent symbols
  CHECK(to_string(differentiate(P("x1"), "t")) == "0");

  CHECK(structural_equal(differentiate(P("sin(t^2)"), "t"),
                         simplify(P("2*t*cos(t^2)"))));
  CHECK(structural_equal(differentiate(P("exp(3*t)"), "t"),
                         simplify(P("3*exp(3*t)"))));
  CHECK(structural_equal(differentiate(P("log(t)"), "t"), simplify(P("1/t"))));
  CHECK(structural_equal(differentiate(P("t^(2/3)"), "t"),
                         simplify(P("2/3*t^(-1/3)"))));
}

TEST_CASE("derivative of a general-exponent power uses exp/log form") {
  Expr d = differentiate(P("t^u1"), "t");
  // d/dt t^u1 = u1 * t^(u1-1); check numerically
  std::map<std::string, double> pt = {{"t", 1.7}, {"u1", 2.3}};
  double expect = 2.3 * std::pow(1.7, 1.3);
  CHECK(evaluate(d, pt) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("derivatives are linear over rational constant combinations") {
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"x1^3", "sin(x1)"},
      {"t*x1^2", "exp(x1)"},
      {"x1^(-2)", "x1*log(x1)"},
  };
  for (auto& [e1, e2] : pairs) {
    Expr lhs = differentiate(simplify(make_rational(3, 2) * P(e1) +
                                      make_rational(-5, 7) * P(e2)),
                             "x1");
    Expr rhs = simplify(make_rational(3, 2) * differentiate(P(e1), "x1") +
                        make_rational(-5, 7) * differentiate(P(e2), "x1"));
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(structural_equal(lhs, rhs));
  }
}

TEST_CASE("symbolic derivatives agree with central differences") {
  // random polynomial/transcendental expressions at random points
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> expo(1, 4);
  std::uniform_real_distribution<double> pt_d(0.4, 1.9);

  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    // build sum of a few random atoms in t, x1, u1
    Expr e = make_real(coef(rng));
    const char* vars[] = {"t", "x1", "u1"};
    for (int k = 0; k < 3; ++k) {
      Expr atom = pow(kAb.var(vars[k]), expo(rng));
      switch (i % 4) {
        case 0: atom = make_call(Builtin::sin, atom); break;
        case 1: atom = make_call(Builtin::exp, kAb.var(vars[k]) * make_real(coef(rng))); break;
        case 2: atom = atom * make_call(Builtin::log, kAb.var(vars[k])); break;
        default: break;
      }
      e = e + make_real(coef(rng)) * atom;
    }
    std::map<std::string, double> point = {
        {"t", pt_d(rng)}, {"x1", pt_d(rng)}, {"u1", pt_d(rng)}};
    for (const char* v : vars) {
      Expr de = differentiate(e, v);
      double sym = evaluate(de, point);
      const double h = 1e-6;
      auto shifted = point;
      shifted[v] = point.at(v) + h;
      double up = evaluate(e, shifted);
      shifted[v] = point.at(v) - h;
      double dn = evaluate(e, shifted);
      double fd = (up - dn) / (2 * h);
      double denom = std::max(1.0, std::abs(sym));
      CAPTURE(to_string(e));
      CHECK(std::abs(sym - fd) / denom <= 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("substitution is simultaneous and simplifies") {
  Expr e = substitute(P("psi1*u1"), {{"u1", P("2*t")}});
  CHECK(structural_equal(e, simplify(P("2*psi1*t"))));

  // simultaneous: swapping names does not cascade
  Expr swap = substitute(P("x1 + u1"), {{"x1", P("u1")}, {"u1", P("x1")}});
  CHECK(structural_equal(swap, simplify(P("x1 + u1"))));

  Expr idy = substitute(P("x1 + sin(t)"), {});
  CHECK(structural_equal(idy, simplify(P("x1 + sin(t)"))));
}

TEST_CASE("evaluation: exact values and domain faults name the subtree") {
  CHECK(evaluate(P("-u1^2 + psi1*u1"), {{"u1", 1}, {"psi1", 2}}) == doctest::Approx(1.0));
  CHECK(evaluate(P("4/3*t^(-1/3)"), {{"t", 1}}) == doctest::Approx(4.0 / 3.0));
  CHECK(evaluate(P("4/3*t^(-1/3)"), {{"t", 8}}) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS((void)evaluate(P("t^(-1/3)"), {{"t", 0}}), EvalError);
  try {
    evaluate(P("x1 + log(t)"), {{"t", -1}, {"x1", 0}});
    FAIL("expected a domain error");
  } catch (const EvalError& err) {
    CHECK(err.where == "log(t)");
  }
  try {
    evaluate(P("x1 + t"), {{"t", 1}});
    FAIL("expected a missing-binding error");
  } catch (const EvalError& err) {
    CHECK(err.where == "x1");
  }
  CHECK_THROWS_AS((void)evaluate(P("1/(t - 1)"), {{"t", 1}}), EvalError);
}

TEST_CASE("evaluation is deterministic across calls") {
  Expr e = P("sin(t)*exp(x1) + t^u1/\t (x1 + 2)");
  std::map<std::string, double> pt = {{"t", 0.9}, {"x1", 0.2}, {"u1", 1.7}};
  double first = evaluate(e, pt);
  for (int i = 0; i < 5; ++i) CHECK(evaluate(e, pt) == first);
}

TEST_CASE("free variable sets") {
  CHECK(free_vars(P("psi1*u1 - u1^2")) == std::set<std::string>{"psi1", "u1"});
  CHECK(free_vars(P("3.5")).empty());
  CHECK(free_vars(P("t + s")) == std::set<std::string>{"s", "t"});
}

TEST_CASE("zero decision: canonical zero, sampled nonzero, conservative unknown") {
  CHECK(is_zero(P("t^2 - t^2")) == Ternary::provably_zero);
  CHECK(is_zero(P("4*t*x1^3*u1^14 - 4*t^3*u1^14")) == Ternary::provably_nonzero);
  // an identity the polynomial rules cannot close: sin^2 + cos^2 - 1
  CHECK(is_zero(P("sin(t)^2 + cos(t)^2 - 1")) == Ternary::unknown);
  CHECK(is_zero(P("0.0")) == Ternary::provably_zero);
  CHECK(is_zero(P("1/7")) == Ternary::provably_nonzero);
}

TEST_CASE("zero decision is reproducible") {
  Expr e = P("t*x1 - u1");
  Ternary first = is_zero(e);
  for (int i = 0; i < 3; ++i) CHECK(is_zero(e) == first);
  CHECK(first == Ternary::provably_nonzero);
}

TEST_CASE("linear split extracts rate-symbol coefficients") {
  VarAlphabet rates = kAb.with_rates();
  Expr e = simplify(parse("psi1*u1dot + t*x1dot - u1^2", rates));
  auto split = split_linear(e, {"x1dot", "u1dot", "psi1dot"});
  CHECK(structural_equal(split.constant, simplify(parse("-u1^2", rates))));
  CHECK(to_string(split.coeffs[0]) == "t");
  CHECK(to_string(split.coeffs[1]) == "psi1");
  CHECK(to_string(split.coeffs[2]) == "0");

  CHECK_THROWS_AS(split_linear(parse("x1dot^2", rates), {"x1dot"}),
                  std::runtime_error);
}

TEST_CASE("polynomial coefficient extraction over the alphabet") {
  auto ms = polynomial_coeffs(P("3*t^2*u1 - 1/2*x1 + 5"), kAb);
  REQUIRE(ms);
  CHECK(ms->size() == 3);
  // alphabet order: t, x1, u1, psi1, s
  bool saw_tu = false, saw_x = false, saw_const = false;
  for (const auto& m : *ms) {
    if (m.exps == std::vector<int>{2, 0, 1, 0, 0}) {
      saw_tu = true;
      CHECK(m.coeff.rat().str() == "3");
    } else if (m.exps == std::vector<int>{0, 1, 0, 0, 0}) {
      saw_x = true;
      CHECK(m.coeff.rat().str() == "-1/2");
    } else if (m.exps == std::vector<int>{0, 0, 0, 0, 0}) {
      saw_const = true;
      CHECK(m.coeff.rat().str() == "5");
    }
  }
  CHECK(saw_tu);
  CHECK(saw_x);
  CHECK(saw_const);

  CHECK(!polynomial_coeffs(P("sin(t)"), kAb));
  CHECK(!polynomial_coeffs(P("t^(-1)"), kAb));
  CHECK(!polynomial_coeffs(P("t^(1/2)"), kAb));
  auto zero = polynomial_coeffs(P("t - t"), kAb);
  REQUIRE(zero);
  CHECK(zero->empty());
}
