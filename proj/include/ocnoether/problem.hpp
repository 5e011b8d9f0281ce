#ifndef OCNOETHER_PROBLEM_HPP
#define OCNOETHER_PROBLEM_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocnoether/expr.hpp"
#include "ocnoether/quadrature.hpp"

namespace ocnoether {

class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundaryCondition {
  bool is_fixed = false;
  double value = 0.0;
  static BoundaryCondition fixed(double v) { return {true, v}; }
  static BoundaryCondition free() { return {false, 0.0}; }
};

// minimize  I[x,u] = integral_a^b L(t, x(t), u(t)) dt
// subject to x'_i = phi_i(t, x, u) and the endpoint data.
// Controls are unrestricted (u(t) in R^m).
struct OCProblem {
  int n = 0;  // states
  int m = 0;  // controls
  double a = 0.0, b = 1.0;
  Expr L;
  std::vector<Expr> phi;                       // n entries over (t, x*, u*)
  std::vector<BoundaryCondition> x_at_a, x_at_b;  // n entries each
  VarAlphabet alphabet;                        // canonical (t, x*, u*, psi*, s)
};

// Validates: a < b, n >= 1, m >= 1, dimension counts, and that L/phi mention
// only (t, x*, u*) — multipliers never appear in problem data.
OCProblem make_problem(int n, int m, double a, double b, Expr L,
                       std::vector<Expr> phi,
                       std::vector<BoundaryCondition> x_at_a,
                       std::vector<BoundaryCondition> x_at_b);

// H = -L + sum_i psi_i*phi_i, with cached partial derivatives.
struct Hamiltonian {
  Expr H;
  Expr dH_dt;
  std::vector<Expr> dH_dx;    // n
  std::vector<Expr> dH_du;    // m
  std::vector<Expr> dH_dpsi;  // n
};

Hamiltonian hamiltonian(const OCProblem& p);

// Sampled candidate triple (x(.), u(.), psi(.)) on a strictly increasing
// grid, optionally backed by closed forms in t. The grid may stay inside
// (a, b) so singular endpoints are never evaluated.
struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;    // [n][N+1]
  std::vector<std::vector<double>> u;    // [m][N+1]
  std::vector<std::vector<double>> psi;  // [n][N+1]
  std::vector<Expr> x_cf, u_cf, psi_cf;  // closed forms in t; empty when sampled-only
  // function-class metadata: false for L1-but-not-L-infinity controls
  bool control_essentially_bounded = true;

  bool has_closed_form() const { return !x_cf.empty(); }
  std::size_t points() const { return t.size(); }
};

// Validates monotone grid and array shapes; when closed forms are supplied
// checks samples against them to 1e-10 at every grid point.
Trajectory make_trajectory(std::vector<double> grid,
                           std::vector<std::vector<double>> x,
                           std::vector<std::vector<double>> u,
                           std::vector<std::vector<double>> psi,
                           std::vector<Expr> x_cf = {},
                           std::vector<Expr> u_cf = {},
                           std::vector<Expr> psi_cf = {});

// Samples the closed forms on the grid.
Trajectory trajectory_from_closed_form(const std::vector<double>& grid,
                                       std::vector<Expr> x_cf,
                                       std::vector<Expr> u_cf,
                                       std::vector<Expr> psi_cf);

std::vector<double> uniform_grid(double a, double b, std::size_t points);
// grid clustered toward `a` by t_j = a + (b-a)*(j/N)^gamma, starting at j0 >= 1
// so the singular endpoint itself is excluded
std::vector<double> graded_grid(double a, double b, std::size_t points, double gamma);

// Time derivatives of a sample series: symbolic when a closed form is given,
// else 2nd-order central differences (one-sided 2nd-order at the ends).
std::vector<double> series_derivative(const std::vector<double>& t,
                                      const std::vector<double>& v);

struct TrajectoryRates {
  std::vector<std::vector<double>> xdot, udot, psidot;
};
TrajectoryRates trajectory_rates(const Trajectory& tr);

// --- functional values -------------------------------------------------

double cost(const OCProblem& p, const Trajectory& tr);
// J[x,u,psi] = integral (H - psi . x') dt; equals -I on feasible trajectories
double augmented_cost(const OCProblem& p, const Trajectory& tr);

// --- residual series over the trajectory grid --------------------------

// r_cs(t_j) = x'(t_j) - dH/dpsi = x' - phi, one series per state
std::vector<std::vector<double>> pmp_control_residual(const OCProblem& p,
                                                      const Trajectory& tr);
// g(t_j) = -dH/dx: the multiplier rate the adjoint equation demands
std::vector<std::vector<double>> pmp_adjoint_rhs(const OCProblem& p,
                                                 const Trajectory& tr);
// r_mc(t_j) = dH/du, one series per control
std::vector<std::vector<double>> pmp_maximality_residual(const OCProblem& p,
                                                         const Trajectory& tr);
// gap(t_j) = (total dH/dt through x, u, psi) - partial dH/dt
std::vector<double> dhdt_gap(const OCProblem& p, const Trajectory& tr);

double max_abs(const std::vector<std::vector<double>>& series);
double max_abs(const std::vector<double>& series);

// --- first variation ----------------------------------------------------

struct Variation {
  std::vector<Expr> h1;  // n state variations, Exprs in t; h1(a) = h1(b) = 0
  std::vector<Expr> h2;  // m control variations
  std::vector<Expr> h3;  // n multiplier variations
};

// d/deps at eps = 0 of the augmented functional along (x+eps h1, u+eps h2,
// psi+eps h3): integral of dH/dx.h1 + dH/du.h2 + dH/dpsi.h3 - h3.x' - psi.h1'
// No integration by parts is applied anywhere in this computation.
double first_variation(const OCProblem& p, const Trajectory& tr, const Variation& v);

}  // namespace ocnoether

#endif
