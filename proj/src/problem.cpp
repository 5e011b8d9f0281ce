#include "ocnoether/problem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ocnoether/calculus.hpp"
#include "ocnoether/simplify.hpp"
#include "ocnoether/tape.hpp"

namespace ocnoether {

OCProblem make_problem(int n, int m, double a, double b, Expr L,
                       std::vector<Expr> phi,
                       std::vector<BoundaryCondition> x_at_a,
                       std::vector<BoundaryCondition> x_at_b) {
  if (n < 1 || m < 1) throw ProblemError("need n >= 1 states and m >= 1 controls");
  if (!(a < b)) throw ProblemError("horizon must satisfy a < b");
  if (static_cast<int>(phi.size()) != n)
    throw ProblemError("dynamics count must equal the state dimension");
  if (static_cast<int>(x_at_a.size()) != n || static_cast<int>(x_at_b.size()) != n)
    throw ProblemError("boundary data must cover every state");

  OCProblem p;
  p.n = n;
  p.m = m;
  p.a = a;
  p.b = b;
  p.alphabet = VarAlphabet::canonical(n, m);

  auto check_vars = [&](const Expr& e, const std::string& what) {
    for (const auto& v : free_vars(e)) {
      bool ok = v == "t";
      for (int i = 1; i <= n && !ok; ++i) ok = v == "x" + std::to_string(i);
      for (int j = 1; j <= m && !ok; ++j) ok = v == "u" + std::to_string(j);
      if (!ok)
        throw ProblemError(what + " may only mention (t, x*, u*); found '" + v + "'");
    }
  };
  check_vars(L, "Lagrangian");
  for (int i = 0; i < n; ++i) check_vars(phi[i], "dynamics " + std::to_string(i + 1));

  p.L = simplify(L);
  p.phi.reserve(phi.size());
  for (auto& f : phi) p.phi.push_back(simplify(f));
  p.x_at_a = std::move(x_at_a);
  p.x_at_b = std::move(x_at_b);
  return p;
}

Hamiltonian hamiltonian(const OCProblem& p) {
  Expr acc = make_neg(p.L);
  for (int i = 0; i < p.n; ++i)
    acc = acc + p.alphabet.var("psi" + std::to_string(i + 1)) * p.phi[i];
  Hamiltonian h;
  h.H = simplify(acc);
  h.dH_dt = differentiate(h.H, "t");
  for (int i = 1; i <= p.n; ++i)
    h.dH_dx.push_back(differentiate(h.H, "x" + std::to_string(i)));
  for (int j = 1; j <= p.m; ++j)
    h.dH_du.push_back(differentiate(h.H, "u" + std::to_string(j)));
  for (int i = 1; i <= p.n; ++i)
    h.dH_dpsi.push_back(differentiate(h.H, "psi" + std::to_string(i)));
  return h;
}

namespace {

void check_series_shape(const std::vector<std::vector<double>>& s,
                        std::size_t count, std::size_t len, const char* what) {
  if (s.size() != count) throw ProblemError(std::string(what) + ": wrong series count");
  for (const auto& v : s)
    if (v.size() != len) throw ProblemError(std::string(what) + ": wrong series length");
}

}  // namespace

Trajectory make_trajectory(std::vector<double> grid,
                           std::vector<std::vector<double>> x,
                           std::vector<std::vector<double>> u,
                           std::vector<std::vector<double>> psi,
                           std::vector<Expr> x_cf, std::vector<Expr> u_cf,
                           std::vector<Expr> psi_cf) {
  if (grid.size() < 2) throw ProblemError("trajectory needs at least 2 grid points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ProblemError("trajectory grid must be strictly increasing");
  if (x.empty() || u.empty()) throw ProblemError("trajectory needs x and u series");
  if (psi.size() != x.size()) throw ProblemError("psi series count must match x");
  check_series_shape(x, x.size(), grid.size(), "x");
  check_series_shape(u, u.size(), grid.size(), "u");
  check_series_shape(psi, psi.size(), grid.size(), "psi");

  Trajectory tr;
  tr.t = std::move(grid);
  tr.x = std::move(x);
  tr.u = std::move(u);
  tr.psi = std::move(psi);
  tr.x_cf = std::move(x_cf);
  tr.u_cf = std::move(u_cf);
  tr.psi_cf = std::move(psi_cf);

  if (tr.has_closed_form()) {
    if (tr.x_cf.size() != tr.x.size() || tr.u_cf.size() != tr.u.size() ||
        tr.psi_cf.size() != tr.psi.size())
      throw ProblemError("closed-form component count mismatch");
    auto check_cf = [&](const std::vector<Expr>& cf,
                        const std::vector<std::vector<double>>& samples,
                        const char* what) {
      for (std::size_t c = 0; c < cf.size(); ++c)
        for (std::size_t j = 0; j < tr.t.size(); ++j) {
          double v = evaluate(cf[c], {{"t", tr.t[j]}});
          if (std::abs(v - samples[c][j]) > 1e-10 * std::max(1.0, std::abs(v)))
            throw ProblemError(std::string(what) +
                               " samples disagree with the closed form");
        }
    };
    check_cf(tr.x_cf, tr.x, "x");
    check_cf(tr.u_cf, tr.u, "u");
    check_cf(tr.psi_cf, tr.psi, "psi");
  }
  return tr;
}

Trajectory trajectory_from_closed_form(const std::vector<double>& grid,
                                       std::vector<Expr> x_cf,
                                       std::vector<Expr> u_cf,
                                       std::vector<Expr> psi_cf) {
  auto sample = [&](const std::vector<Expr>& cf) {
    std::vector<std::vector<double>> out;
    for (const auto& e : cf) {
      std::vector<double> s;
      s.reserve(grid.size());
      for (double tv : grid) s.push_back(evaluate(e, {{"t", tv}}));
      out.push_back(std::move(s));
    }
    return out;
  };
  // sample before the moves: argument evaluation order is unspecified
  auto xs = sample(x_cf);
  auto us = sample(u_cf);
  auto ps = sample(psi_cf);
  return make_trajectory(grid, std::move(xs), std::move(us), std::move(ps),
                         std::move(x_cf), std::move(u_cf), std::move(psi_cf));
}

std::vector<double> uniform_grid(double a, double b, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t j = 0; j < points; ++j)
    g[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(points - 1);
  return g;
}

std::vector<double> graded_grid(double a, double b, std::size_t points, double gamma) {
  std::vector<double> g(points);
  for (std::size_t j = 0; j < points; ++j) {
    double frac = static_cast<double>(j + 1) / static_cast<double>(points);
    g[j] = a + (b - a) * std::pow(frac, gamma);
  }
  return g;
}

std::vector<double> series_derivative(const std::vector<double>& t,
                                      const std::vector<double>& v) {
  const std::size_t n = t.size();
  if (v.size() != n || n < 3)
    throw ProblemError("series_derivative needs >= 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 0; i + 2 < n; ++i) {
    // three-point Lagrange derivative on (t_i, t_{i+1}, t_{i+2})
    double h1 = t[i + 1] - t[i], h2 = t[i + 2] - t[i + 1];
    if (i == 0)
      d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * v[0] +
             (h1 + h2) / (h1 * h2) * v[1] - h1 / (h2 * (h1 + h2)) * v[2];
    d[i + 1] = -h2 / (h1 * (h1 + h2)) * v[i] + (h2 - h1) / (h1 * h2) * v[i + 1] +
               h1 / (h2 * (h1 + h2)) * v[i + 2];
    if (i + 3 == n)
      d[i + 2] = h2 / (h1 * (h1 + h2)) * v[i] - (h1 + h2) / (h1 * h2) * v[i + 1] +
                 (h1 + 2 * h2) / (h2 * (h1 + h2)) * v[i + 2];
  }
  return d;
}

TrajectoryRates trajectory_rates(const Trajectory& tr) {
  TrajectoryRates r;
  auto derive = [&](const std::vector<Expr>& cf,
                    const std::vector<std::vector<double>>& samples) {
    std::vector<std::vector<double>> out;
    if (!cf.empty()) {
      for (const auto& e : cf) {
        Expr de = differentiate(e, "t");
        std::vector<double> s;
        s.reserve(tr.t.size());
        for (double tv : tr.t) s.push_back(evaluate(de, {{"t", tv}}));
        out.push_back(std::move(s));
      }
    } else {
      for (const auto& v : samples) out.push_back(series_derivative(tr.t, v));
    }
    return out;
  };
  r.xdot = derive(tr.x_cf, tr.x);
  r.udot = derive(tr.u_cf, tr.u);
  r.psidot = derive(tr.psi_cf, tr.psi);
  return r;
}

namespace {

// rows of (t, x*, u*, psi*, s=0 [, xdot*, udot*, psidot*]) along the grid
std::vector<double> pack_rows(const OCProblem& p, const Trajectory& tr,
                              const VarAlphabet& ab, const TrajectoryRates* rates) {
  const std::size_t npts = tr.points();
  const std::size_t w = ab.size();
  std::vector<double> rows(npts * w, 0.0);
  auto col = [&](const std::string& name) {
    int r = ab.rank_of(name);
    if (r < 0) throw ProblemError("pack_rows: missing column " + name);
    return static_cast<std::size_t>(r);
  };
  for (std::size_t j = 0; j < npts; ++j) rows[j * w + col("t")] = tr.t[j];
  for (int i = 0; i < p.n; ++i) {
    std::size_t cx = col("x" + std::to_string(i + 1));
    std::size_t cp = col("psi" + std::to_string(i + 1));
    for (std::size_t j = 0; j < npts; ++j) {
      rows[j * w + cx] = tr.x[i][j];
      rows[j * w + cp] = tr.psi[i][j];
    }
  }
  for (int i = 0; i < p.m; ++i) {
    std::size_t cu = col("u" + std::to_string(i + 1));
    for (std::size_t j = 0; j < npts; ++j) rows[j * w + cu] = tr.u[i][j];
  }
  if (rates) {
    for (int i = 0; i < p.n; ++i) {
      std::size_t cx = col("x" + std::to_string(i + 1) + "dot");
      std::size_t cp = col("psi" + std::to_string(i + 1) + "dot");
      for (std::size_t j = 0; j < npts; ++j) {
        rows[j * w + cx] = rates->xdot[i][j];
        rows[j * w + cp] = rates->psidot[i][j];
      }
    }
    for (int i = 0; i < p.m; ++i) {
      std::size_t cu = col("u" + std::to_string(i + 1) + "dot");
      for (std::size_t j = 0; j < npts; ++j) rows[j * w + cu] = rates->udot[i][j];
    }
  }
  return rows;
}

std::vector<double> eval_series(const Expr& e, const VarAlphabet& ab,
                                const std::vector<double>& rows, std::size_t npts) {
  CompiledExpr ce = compile(e, ab);
  std::vector<double> out(npts);
  eval_grid(ce, rows.data(), npts, out.data());
  return out;
}

// substitute the trajectory's closed forms into an expression over the
// canonical alphabet, leaving a function of t alone
Expr compose_cf(const Expr& e, const OCProblem& p, const Trajectory& tr) {
  std::map<std::string, Expr> b;
  for (int i = 0; i < p.n; ++i) {
    b["x" + std::to_string(i + 1)] = tr.x_cf[i];
    b["psi" + std::to_string(i + 1)] = tr.psi_cf[i];
  }
  for (int j = 0; j < p.m; ++j) b["u" + std::to_string(j + 1)] = tr.u_cf[j];
  return substitute(e, b);
}

// integral of a function of t over [lo, hi]: plain adaptive first, graded
// retries when an endpoint singularity defeats it
double integrate_in_time(const Expr& f_of_t, double lo, double hi) {
  auto f = [&](double tv) { return evaluate(f_of_t, {{"t", tv}}); };
  QuadratureSpec spec;
  spec.abs_tol = 1e-9;
  spec.rel_tol = 1e-9;
  IntegrateResult best = integrate(f, lo, hi, spec);
  if (best.converged) return best.value;
  for (bool left : {true, false}) {
    QuadratureSpec g = spec;
    g.graded = true;
    g.graded_left = left;
    IntegrateResult r = integrate(f, lo, hi, g);
    if (r.error_estimate < best.error_estimate) best = r;
    if (best.converged) return best.value;
  }
  if (!best.converged)
    throw QuadratureError("time integral did not reach requested accuracy");
  return best.value;
}

}  // namespace

double cost(const OCProblem& p, const Trajectory& tr) {
  if (tr.has_closed_form())
    return integrate_in_time(compose_cf(p.L, p, tr), p.a, p.b);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  std::vector<double> lvals = eval_series(p.L, p.alphabet, rows, tr.points());
  return simpson_tabulated(tr.t, lvals);
}

double augmented_cost(const OCProblem& p, const Trajectory& tr) {
  Hamiltonian h = hamiltonian(p);
  if (tr.has_closed_form()) {
    Expr integrand = h.H;
    for (int i = 0; i < p.n; ++i)
      integrand = integrand - p.alphabet.var("psi" + std::to_string(i + 1)) *
                                  differentiate(tr.x_cf[i], "t");
    return integrate_in_time(compose_cf(simplify(integrand), p, tr), p.a, p.b);
  }
  TrajectoryRates rates = trajectory_rates(tr);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  std::vector<double> hv = eval_series(h.H, p.alphabet, rows, tr.points());
  for (int i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < tr.points(); ++j)
      hv[j] -= tr.psi[i][j] * rates.xdot[i][j];
  return simpson_tabulated(tr.t, hv);
}

std::vector<std::vector<double>> pmp_control_residual(const OCProblem& p,
                                                      const Trajectory& tr) {
  TrajectoryRates rates = trajectory_rates(tr);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < p.n; ++i) {
    std::vector<double> phi_v = eval_series(p.phi[i], p.alphabet, rows, tr.points());
    std::vector<double> r(tr.points());
    for (std::size_t j = 0; j < tr.points(); ++j) r[j] = rates.xdot[i][j] - phi_v[j];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<double>> pmp_adjoint_rhs(const OCProblem& p,
                                                 const Trajectory& tr) {
  Hamiltonian h = hamiltonian(p);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < p.n; ++i) {
    std::vector<double> g = eval_series(h.dH_dx[i], p.alphabet, rows, tr.points());
    for (auto& v : g) v = -v;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<std::vector<double>> pmp_maximality_residual(const OCProblem& p,
                                                         const Trajectory& tr) {
  Hamiltonian h = hamiltonian(p);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  std::vector<std::vector<double>> out;
  for (int j = 0; j < p.m; ++j)
    out.push_back(eval_series(h.dH_du[j], p.alphabet, rows, tr.points()));
  return out;
}

std::vector<double> dhdt_gap(const OCProblem& p, const Trajectory& tr) {
  Hamiltonian h = hamiltonian(p);
  TrajectoryRates rates = trajectory_rates(tr);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  const std::size_t npts = tr.points();
  std::vector<double> gap(npts, 0.0);
  for (int i = 0; i < p.n; ++i) {
    std::vector<double> dx = eval_series(h.dH_dx[i], p.alphabet, rows, npts);
    std::vector<double> dp = eval_series(h.dH_dpsi[i], p.alphabet, rows, npts);
    for (std::size_t j = 0; j < npts; ++j)
      gap[j] += dx[j] * rates.xdot[i][j] + dp[j] * rates.psidot[i][j];
  }
  for (int i = 0; i < p.m; ++i) {
    std::vector<double> du = eval_series(h.dH_du[i], p.alphabet, rows, npts);
    for (std::size_t j = 0; j < npts; ++j) gap[j] += du[j] * rates.udot[i][j];
  }
  return gap;
}

double max_abs(const std::vector<std::vector<double>>& series) {
  double m = 0.0;
  for (const auto& s : series)
    for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const std::vector<double>& series) {
  double m = 0.0;
  for (double v : series) m = std::max(m, std::abs(v));
  return m;
}

double first_variation(const OCProblem& p, const Trajectory& tr, const Variation& v) {
  if (static_cast<int>(v.h1.size()) != p.n || static_cast<int>(v.h2.size()) != p.m ||
      static_cast<int>(v.h3.size()) != p.n)
    throw ProblemError("variation dimensions do not match the problem");
  for (const auto& h : v.h1) {
    for (double endpoint : {p.a, p.b}) {
      double val = evaluate(h, {{"t", endpoint}});
      if (std::abs(val) > 1e-12)
        throw ProblemError("state variation must vanish at both endpoints");
    }
  }
  Hamiltonian ham = hamiltonian(p);

  if (tr.has_closed_form()) {
    Expr acc = make_rational(0);
    for (int i = 0; i < p.n; ++i) {
      acc = acc + compose_cf(ham.dH_dx[i], p, tr) * v.h1[i];
      acc = acc + compose_cf(ham.dH_dpsi[i], p, tr) * v.h3[i] -
            v.h3[i] * differentiate(tr.x_cf[i], "t");
      acc = acc - tr.psi_cf[i] * differentiate(v.h1[i], "t");
    }
    for (int j = 0; j < p.m; ++j)
      acc = acc + compose_cf(ham.dH_du[j], p, tr) * v.h2[j];
    return integrate_in_time(simplify(acc), p.a, p.b);
  }

  TrajectoryRates rates = trajectory_rates(tr);
  std::vector<double> rows = pack_rows(p, tr, p.alphabet, nullptr);
  const std::size_t npts = tr.points();
  std::vector<double> integrand(npts, 0.0);
  for (int i = 0; i < p.n; ++i) {
    std::vector<double> dx = eval_series(ham.dH_dx[i], p.alphabet, rows, npts);
    std::vector<double> dp = eval_series(ham.dH_dpsi[i], p.alphabet, rows, npts);
    Expr h1d = differentiate(v.h1[i], "t");
    for (std::size_t j = 0; j < npts; ++j) {
      double h1v = evaluate(v.h1[i], {{"t", tr.t[j]}});
      double h3v = evaluate(v.h3[i], {{"t", tr.t[j]}});
      double h1dv = evaluate(h1d, {{"t", tr.t[j]}});
      integrand[j] += dx[j] * h1v + dp[j] * h3v - h3v * rates.xdot[i][j] -
                      tr.psi[i][j] * h1dv;
    }
  }
  for (int jj = 0; jj < p.m; ++jj) {
    std::vector<double> du = eval_series(ham.dH_du[jj], p.alphabet, rows, npts);
    for (std::size_t j = 0; j < npts; ++j)
      integrand[j] += du[j] * evaluate(v.h2[jj], {{"t", tr.t[j]}});
  }
  return simpson_tabulated(tr.t, integrand);
}

}  // namespace ocnoether
