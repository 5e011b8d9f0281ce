#ifndef OCNOETHER_SHOOTING_HPP
#define OCNOETHER_SHOOTING_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "ocnoether/problem.hpp"

namespace ocnoether {

// Carries the time at which integration or matching broke down; expected for
// problems whose minimizing control is unbounded near an endpoint.
class ShootingError : public std::runtime_error {
 public:
  ShootingError(const std::string& what, double at_time_)
      : std::runtime_error(what + " (t = " + std::to_string(at_time_) + ")"),
        at_time(at_time_) {}
  double at_time;
};

struct ShootingSpec {
  double ode_tol = 1e-10;      // per-step error control, mixed abs/rel
  double newton_tol = 1e-9;    // boundary mismatch, infinity norm
  int max_newton_iters = 50;
  double fd_step = 1e-6;       // Jacobian step on the unknown initial data
  std::size_t output_points = 2001;
  std::vector<double> psi0_guess;  // seed for psi(a); zeros when empty
};

// Stationary control at fixed (t, x, psi): damped Newton on dH/du = 0 with
// the exact symbolic Hessian d2H/du2. `seed` warm-starts the iteration.
struct ControlSolve {
  std::vector<double> u;
  bool nonconcave = false;  // Hessian has a positive diagonal entry at the root
};
ControlSolve control_from_maximality(const OCProblem& p, const Hamiltonian& h,
                                     double t, const std::vector<double>& x,
                                     const std::vector<double>& psi,
                                     std::vector<double> seed);

// Single shooting for the extremal system x' = dH/dpsi, psi' = -dH/dx with
// dH/du = 0 enforced pointwise. Unknown initial data (psi_i(a) where x_i(a)
// is pinned, x_i(a) where it is free — then psi_i(a) = 0) is matched against
// the terminal conditions (x_i(b) pinned, else psi_i(b) = 0) by damped
// finite-difference Newton. Output is sampled on a uniform grid.
Trajectory solve_extremal(const OCProblem& p, const ShootingSpec& spec = {});

}  // namespace ocnoether

#endif
