#include "ocnoether/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ocnoether/calculus.hpp"
#include "ocnoether/tape.hpp"

namespace ocnoether {

namespace {

// Gaussian elimination with partial pivoting for the small dense systems
// here (control Hessians, shooting Jacobians). Returns false when singular.
bool solve_dense(std::vector<double> A, std::vector<double> b,
                 std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
    if (std::abs(A[piv * n + c]) < 1e-300) return false;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      double f = A[r * n + c] / A[c * n + c];
      for (int k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
      b[r] -= f * b[c];
    }
  }
  out.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int k = r + 1; k < n; ++k) acc -= A[r * n + k] * out[k];
    out[r] = acc / A[r * n + r];
  }
  return true;
}

// compiled partials of H needed along the flow
struct CompiledSystem {
  VarAlphabet ab;
  std::vector<CompiledExpr> dH_dx, dH_du, dH_dpsi;
  std::vector<std::vector<CompiledExpr>> d2H_du2;  // m x m

  explicit CompiledSystem(const OCProblem& p, const Hamiltonian& h) : ab(p.alphabet) {
    for (const auto& e : h.dH_dx) dH_dx.push_back(compile(e, ab));
    for (const auto& e : h.dH_du) dH_du.push_back(compile(e, ab));
    for (const auto& e : h.dH_dpsi) dH_dpsi.push_back(compile(e, ab));
    for (int j = 0; j < p.m; ++j) {
      std::vector<CompiledExpr> row;
      for (int k = 0; k < p.m; ++k)
        row.push_back(compile(
            differentiate(h.dH_du[j], "u" + std::to_string(k + 1)), ab));
      d2H_du2.push_back(std::move(row));
    }
  }
};

struct Workspace {
  const OCProblem& p;
  const CompiledSystem& sys;
  std::vector<double> row;  // one alphabet-wide variable row

  Workspace(const OCProblem& p_, const CompiledSystem& sys_)
      : p(p_), sys(sys_), row(sys_.ab.size(), 0.0) {}

  void load(double t, const double* x, const double* u, const double* psi) {
    row[0] = t;  // canonical order: t, x*, u*, psi*, s
    for (int i = 0; i < p.n; ++i) row[1 + i] = x[i];
    for (int j = 0; j < p.m; ++j) row[1 + p.n + j] = u[j];
    for (int i = 0; i < p.n; ++i) row[1 + p.n + p.m + i] = psi[i];
  }
};

// damped Newton for dH/du = 0 at fixed (t, x, psi); nullopt-like bool result
bool stationary_control(Workspace& w, double t, const double* x,
                        const double* psi, std::vector<double>& u,
                        bool* nonconcave) {
  const int m = w.p.m;
  std::vector<double> grad(m), step, hess(m * m);
  auto eval_grad = [&](const std::vector<double>& uv, std::vector<double>& g) {
    w.load(t, x, uv.data(), psi);
    double norm = 0.0;
    for (int j = 0; j < m; ++j) {
      g[j] = w.sys.dH_du[j].eval(w.row.data());
      norm = std::max(norm, std::abs(g[j]));
    }
    return norm;
  };
  double gnorm = eval_grad(u, grad);
  for (int iter = 0; iter < 80; ++iter) {
    if (!std::isfinite(gnorm)) return false;
    if (gnorm <= 1e-12) break;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        hess[j * m + k] = w.sys.d2H_du2[j][k].eval(w.row.data());
    std::vector<double> rhs(m);
    for (int j = 0; j < m; ++j) rhs[j] = -grad[j];
    if (!solve_dense(hess, rhs, step)) return false;
    double lambda = 1.0;
    std::vector<double> trial(m), tgrad(m);
    bool improved = false;
    for (int back = 0; back < 40; ++back) {
      for (int j = 0; j < m; ++j) trial[j] = u[j] + lambda * step[j];
      double tnorm = eval_grad(trial, tgrad);
      if (std::isfinite(tnorm) && tnorm < gnorm) {
        u = trial;
        grad = tgrad;
        gnorm = tnorm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
    // fixed point at double precision: the step no longer moves u
    double move = 0.0, scale = 1.0;
    for (int j = 0; j < m; ++j) {
      move = std::max(move, std::abs(lambda * step[j]));
      scale = std::max(scale, std::abs(u[j]));
    }
    if (move <= 1e-14 * scale) break;
  }
  // acceptance scale: gradient terms carry the multiplier additively, so
  // rounding noise in dH/du grows with |psi|; 1e-10 is then relative to that
  double gscale = 1.0;
  for (int i = 0; i < w.p.n; ++i) gscale = std::max(gscale, std::abs(psi[i]));
  if (!(gnorm <= 1e-10 * gscale)) return false;
  if (nonconcave) {
    w.load(t, x, u.data(), psi);
    *nonconcave = false;
    for (int j = 0; j < m; ++j)
      if (w.sys.d2H_du2[j][j].eval(w.row.data()) > 0.0) *nonconcave = true;
  }
  return true;
}

}  // namespace

ControlSolve control_from_maximality(const OCProblem& p, const Hamiltonian& h,
                                     double t, const std::vector<double>& x,
                                     const std::vector<double>& psi,
                                     std::vector<double> seed) {
  CompiledSystem sys(p, h);
  Workspace w(p, sys);
  if (static_cast<int>(seed.size()) != p.m) seed.assign(p.m, 0.0);
  ControlSolve out;
  out.u = std::move(seed);
  if (!stationary_control(w, t, x.data(), psi.data(), out.u, &out.nonconcave))
    throw ShootingError("stationarity condition dH/du = 0 has no solution here", t);
  return out;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 5179.0 / 57600, kE3 = 7571.0 / 16695, kE4 = 393.0 / 640,
                 kE5 = -92097.0 / 339200, kE6 = 187.0 / 2100, kE7 = 1.0 / 40;

struct Integrator {
  Workspace w;
  std::vector<double> u;  // warm-started stationary control

  Integrator(const OCProblem& p, const CompiledSystem& sys)
      : w(p, sys), u(p.m, 0.0) {}

  // y = (x, psi); dy = (dH/dpsi, -dH/dx) with u from dH/du = 0
  void deriv(double t, const std::vector<double>& y, std::vector<double>& dy) {
    const int n = w.p.n;
    if (!stationary_control(w, t, y.data(), y.data() + n, u, nullptr))
      throw ShootingError("stationarity condition dH/du = 0 broke down", t);
    w.load(t, y.data(), u.data(), y.data() + n);
    dy.resize(2 * n);
    for (int i = 0; i < n; ++i) dy[i] = w.sys.dH_dpsi[i].eval(w.row.data());
    for (int i = 0; i < n; ++i) dy[n + i] = -w.sys.dH_dx[i].eval(w.row.data());
  }

  // advance from t to t_end with adaptive steps
  void advance(double& t, std::vector<double>& y, double t_end, double tol,
               double span) {
    const std::size_t d = y.size();
    std::vector<double> k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), yt(d),
        y5(d), y4(d);
    double h = std::min(span / 1000.0, t_end - t);
    while (true) {
      double remaining = t_end - t;
      if (remaining <= 1e-14 * span) {
        t = t_end;  // within roundoff of the target time
        break;
      }
      if (h < 1e-14 * span)
        throw ShootingError("integration step size underflow", t);
      h = std::min(h, remaining);
      deriv(t, y, k1);
      for (std::size_t i = 0; i < d; ++i) yt[i] = y[i] + h * kA21 * k1[i];
      deriv(t + h / 5.0, yt, k2);
      for (std::size_t i = 0; i < d; ++i)
        yt[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
      deriv(t + 3.0 * h / 10.0, yt, k3);
      for (std::size_t i = 0; i < d; ++i)
        yt[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
      deriv(t + 4.0 * h / 5.0, yt, k4);
      for (std::size_t i = 0; i < d; ++i)
        yt[i] = y[i] +
                h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
      deriv(t + 8.0 * h / 9.0, yt, k5);
      for (std::size_t i = 0; i < d; ++i)
        yt[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                            kA64 * k4[i] + kA65 * k5[i]);
      deriv(t + h, yt, k6);
      for (std::size_t i = 0; i < d; ++i)
        y5[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                            kB5 * k5[i] + kB6 * k6[i]);
      deriv(t + h, y5, k7);
      double err = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        y4[i] = y[i] + h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                            kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
        double scale = tol * (1.0 + std::abs(y[i]));
        err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
      }
      if (!std::isfinite(err)) err = 1e10;
      if (err <= 1.0) {
        t += h;
        y = y5;
      }
      h *= std::clamp(0.9 * std::pow(err > 0 ? 1.0 / err : 1e10, 0.2), 0.2, 5.0);
    }
  }
};

}  // namespace

Trajectory solve_extremal(const OCProblem& p, const ShootingSpec& spec) {
  Hamiltonian ham = hamiltonian(p);
  CompiledSystem sys(p, ham);
  const int n = p.n;
  const double span = p.b - p.a;

  // unknown initial data: psi_i(a) where x_i(a) is pinned, x_i(a) where free
  std::vector<double> z(n, 0.0);
  if (!spec.psi0_guess.empty()) {
    if (static_cast<int>(spec.psi0_guess.size()) != n)
      throw ProblemError("psi0_guess must have one entry per state");
    for (int i = 0; i < n; ++i)
      if (p.x_at_a[i].is_fixed) z[i] = spec.psi0_guess[i];
  }

  auto initial_state = [&](const std::vector<double>& zz) {
    std::vector<double> y(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (p.x_at_a[i].is_fixed) {
        y[i] = p.x_at_a[i].value;
        y[n + i] = zz[i];
      } else {
        y[i] = zz[i];
        y[n + i] = 0.0;  // free initial state: psi_i(a) = 0
      }
    }
    return y;
  };

  auto boundary_residual = [&](const std::vector<double>& zz) {
    Integrator integ(p, sys);
    std::vector<double> y = initial_state(zz);
    double t = p.a;
    integ.advance(t, y, p.b, spec.ode_tol, span);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i)
      r[i] = p.x_at_b[i].is_fixed ? y[i] - p.x_at_b[i].value : y[n + i];
    return r;
  };

  std::vector<double> r = boundary_residual(z);
  auto norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  int iter = 0;
  while (norm(r) > spec.newton_tol) {
    if (++iter > spec.max_newton_iters)
      throw ShootingError("boundary matching did not converge", p.b);
    std::vector<double> J(n * n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> zp = z;
      zp[c] += spec.fd_step;
      std::vector<double> rp = boundary_residual(zp);
      for (int i = 0; i < n; ++i) J[i * n + c] = (rp[i] - r[i]) / spec.fd_step;
    }
    std::vector<double> step, rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -r[i];
    if (!solve_dense(J, rhs, step))
      throw ShootingError("singular shooting Jacobian", p.b);
    double lambda = 1.0;
    bool improved = false;
    for (int back = 0; back < 20; ++back) {
      std::vector<double> zt(n);
      for (int i = 0; i < n; ++i) zt[i] = z[i] + lambda * step[i];
      std::vector<double> rt = boundary_residual(zt);
      if (norm(rt) < norm(r)) {
        z = zt;
        r = rt;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw ShootingError("boundary matching stalled", p.b);
  }

  // final sweep, recording on the uniform output grid
  std::vector<double> grid = uniform_grid(p.a, p.b, spec.output_points);
  std::vector<std::vector<double>> xs(n, std::vector<double>(grid.size()));
  std::vector<std::vector<double>> ps(n, std::vector<double>(grid.size()));
  std::vector<std::vector<double>> us(p.m, std::vector<double>(grid.size()));
  Integrator integ(p, sys);
  std::vector<double> y = initial_state(z);
  double t = p.a;
  std::vector<double> useed(p.m, 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j > 0) integ.advance(t, y, grid[j], spec.ode_tol, span);
    if (!stationary_control(integ.w, grid[j], y.data(), y.data() + n, useed,
                            nullptr))
      throw ShootingError("stationarity condition dH/du = 0 broke down", grid[j]);
    for (int i = 0; i < n; ++i) {
      xs[i][j] = y[i];
      ps[i][j] = y[n + i];
    }
    for (int i = 0; i < p.m; ++i) us[i][j] = useed[i];
  }
  return make_trajectory(std::move(grid), std::move(xs), std::move(us),
                         std::move(ps));
}

}  // namespace ocnoether
