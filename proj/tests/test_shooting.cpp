#include <cmath>
#include <vector>

#include "doctest.h"
#include "ocnoether/parse.hpp"
#include "ocnoether/problem.hpp"
#include "ocnoether/shooting.hpp"

using namespace ocnoether;

namespace {

OCProblem quadratic_control(double a, double b, BoundaryCondition at_a,
                            BoundaryCondition at_b) {
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  return make_problem(1, 1, a, b, parse("u1^2", ab), {parse("u1", ab)}, {at_a},
                      {at_b});
}

}  // namespace

TEST_CASE("straight-line connection: x=t, u=1, psi=2") {
  OCProblem p = quadratic_control(0.0, 1.0, BoundaryCondition::fixed(0.0),
                                  BoundaryCondition::fixed(1.0));
  Trajectory tr = solve_extremal(p);
  CHECK(tr.points() == 2001);
  CHECK(tr.t.front() == 0.0);
  CHECK(tr.t.back() == 1.0);
  for (std::size_t j = 0; j < tr.points(); ++j) {
    CHECK(std::abs(tr.x[0][j] - tr.t[j]) <= 1e-8);
    CHECK(std::abs(tr.u[0][j] - 1.0) <= 1e-8);
    CHECK(std::abs(tr.psi[0][j] - 2.0) <= 1e-8);
  }
  CHECK(max_abs(pmp_maximality_residual(p, tr)) <= 1e-10);
  CHECK(max_abs(pmp_control_residual(p, tr)) <= 1e-6);
  CHECK(max_abs(dhdt_gap(p, tr)) <= 1e-6);
}

TEST_CASE("tracking problem matches its sinh/cosh solution") {
  // L = u^2 + x^2, x' = u, x(0)=0, x(1)=1:
  // x = sinh(t)/sinh(1), u = cosh(t)/sinh(1), psi = 2u
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  OCProblem p = make_problem(1, 1, 0.0, 1.0, parse("u1^2 + x1^2", ab),
                             {parse("u1", ab)}, {BoundaryCondition::fixed(0.0)},
                             {BoundaryCondition::fixed(1.0)});
  Trajectory tr = solve_extremal(p);
  double s1 = std::sinh(1.0);
  for (std::size_t j = 0; j < tr.points(); j += 10) {
    double t = tr.t[j];
    CHECK(std::abs(tr.x[0][j] - std::sinh(t) / s1) <= 1e-6);
    CHECK(std::abs(tr.u[0][j] - std::cosh(t) / s1) <= 1e-6);
    CHECK(std::abs(tr.psi[0][j] - 2.0 * std::cosh(t) / s1) <= 1e-6);
  }
  CHECK(max_abs(pmp_maximality_residual(p, tr)) <= 1e-10);
  CHECK(max_abs(pmp_control_residual(p, tr)) <= 1e-6);
  CHECK(max_abs(dhdt_gap(p, tr)) <= 1e-6);
}

TEST_CASE("free terminal state forces psi(b) = 0") {
  OCProblem p = quadratic_control(0.0, 1.0, BoundaryCondition::fixed(0.0),
                                  BoundaryCondition::free());
  Trajectory tr = solve_extremal(p);
  // doing nothing is optimal
  CHECK(max_abs(tr.u) <= 1e-9);
  CHECK(max_abs(tr.psi) <= 1e-9);
  CHECK(max_abs(tr.x) <= 1e-9);
}

TEST_CASE("free initial state forces psi(a) = 0") {
  OCProblem p = quadratic_control(0.0, 1.0, BoundaryCondition::free(),
                                  BoundaryCondition::fixed(1.0));
  Trajectory tr = solve_extremal(p);
  // x starts wherever it must so that zero control reaches x(1) = 1
  for (std::size_t j = 0; j < tr.points(); ++j)
    CHECK(std::abs(tr.x[0][j] - 1.0) <= 1e-8);
  CHECK(max_abs(tr.u) <= 1e-9);
  CHECK(max_abs(tr.psi) <= 1e-9);
}

TEST_CASE("finite-time blow-up reports the breakdown time") {
  // with the zero initial multiplier guess the control stays 0 and
  // x' = 1 + x^2 escapes at t = pi/2 < b
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  OCProblem p = make_problem(1, 1, 0.0, 2.0, parse("u1^2", ab),
                             {parse("u1 + 1 + x1^2", ab)},
                             {BoundaryCondition::fixed(0.0)},
                             {BoundaryCondition::fixed(0.0)});
  bool threw = false;
  try {
    solve_extremal(p);
  } catch (const ShootingError& e) {
    threw = true;
    CHECK(std::abs(e.at_time - 1.5707963) <= 0.01);
  }
  CHECK(threw);
}

TEST_CASE("stationary control at a fixed point of the flow") {
  OCProblem p = quadratic_control(0.0, 1.0, BoundaryCondition::fixed(0.0),
                                  BoundaryCondition::fixed(1.0));
  Hamiltonian h = hamiltonian(p);
  ControlSolve cs = control_from_maximality(p, h, 0.3, {0.1}, {3.0}, {0.0});
  CHECK(cs.u[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_FALSE(cs.nonconcave);
}

TEST_CASE("stationary control flags a non-concave profile") {
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  OCProblem p = make_problem(1, 1, 0.0, 1.0, parse("-u1^2", ab),
                             {parse("u1", ab)}, {BoundaryCondition::fixed(0.0)},
                             {BoundaryCondition::fixed(1.0)});
  Hamiltonian h = hamiltonian(p);
  ControlSolve cs = control_from_maximality(p, h, 0.0, {0.0}, {1.0}, {0.0});
  CHECK(cs.u[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(cs.nonconcave);
}

TEST_CASE("stationary control reports an unsolvable condition") {
  // H is linear in u: dH/du = psi - 1 never vanishes for psi != 1
  VarAlphabet ab = VarAlphabet::canonical(1, 1);
  OCProblem p = make_problem(1, 1, 0.0, 1.0, parse("u1", ab), {parse("u1", ab)},
                             {BoundaryCondition::fixed(0.0)},
                             {BoundaryCondition::fixed(1.0)});
  Hamiltonian h = hamiltonian(p);
  CHECK_THROWS_AS(
      control_from_maximality(p, h, 0.0, {0.0}, {0.5}, {0.0}),
      ShootingError);
}
