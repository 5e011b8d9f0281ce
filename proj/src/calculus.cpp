#include "ocnoether/calculus.hpp"

#include <cmath>
#include <random>

#include "ocnoether/simplify.hpp"

namespace ocnoether {

namespace {

bool mentions(const Expr& e, const std::string& v) {
  switch (e->op) {
    case ExprOp::number: return false;
    case ExprOp::variable: return e->var_name == v;
    case ExprOp::neg:
    case ExprOp::call: return mentions(e->a, v);
    default: return mentions(e->a, v) || mentions(e->b, v);
  }
}

Expr one() { return make_rational(1); }
Expr zero() { return make_rational(0); }

// raw derivative tree; simplified once by the public wrapper
Expr diff(const Expr& e, const std::string& v) {
  switch (e->op) {
    case ExprOp::number:
      return zero();
    case ExprOp::variable:
      return e->var_name == v ? one() : zero();
    case ExprOp::add:
      return diff(e->a, v) + diff(e->b, v);
    case ExprOp::sub:
      return diff(e->a, v) - diff(e->b, v);
    case ExprOp::neg:
      return -diff(e->a, v);
    case ExprOp::mul:
      return diff(e->a, v) * e->b + e->a * diff(e->b, v);
    case ExprOp::div:
      return (diff(e->a, v) * e->b - e->a * diff(e->b, v)) / (e->b * e->b);
    case ExprOp::pow: {
      const Expr& base = e->a;
      const Expr& ex = e->b;
      if (!mentions(ex, v)) {
        // d(a^c) = c * a^(c-1) * a'
        return ex * pow(base, ex - one()) * diff(base, v);
      }
      if (!mentions(base, v)) {
        // d(c^b) = c^b * log(c) * b'
        return e * make_call(Builtin::log, base) * diff(ex, v);
      }
      return e * (diff(ex, v) * make_call(Builtin::log, base) +
                  ex * diff(base, v) / base);
    }
    case ExprOp::call: {
      Expr inner = diff(e->a, v);
      switch (e->fn) {
        case Builtin::sin: return make_call(Builtin::cos, e->a) * inner;
        case Builtin::cos: return -make_call(Builtin::sin, e->a) * inner;
        case Builtin::exp: return e * inner;
        case Builtin::log: return inner / e->a;
        case Builtin::sqrt: return inner / (make_rational(2) * e);
        case Builtin::abs:
          // a/|a| * a', valid away from a = 0
          return e->a * inner / e;
      }
    }
  }
  return zero();
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& v) {
  return simplify(diff(e, v));
}

namespace {

Expr subst(const Expr& e, const std::map<std::string, Expr>& b) {
  switch (e->op) {
    case ExprOp::number:
      return e;
    case ExprOp::variable: {
      auto it = b.find(e->var_name);
      return it == b.end() ? e : it->second;
    }
    case ExprOp::neg:
      return make_neg(subst(e->a, b));
    case ExprOp::call:
      return make_call(e->fn, subst(e->a, b));
    default:
      return make_binary(e->op, subst(e->a, b), subst(e->b, b));
  }
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  return simplify(subst(e, bindings));
}

namespace {

double eval(const Expr& e, const std::map<std::string, double>& b) {
  switch (e->op) {
    case ExprOp::number:
      return e->num.value();
    case ExprOp::variable: {
      auto it = b.find(e->var_name);
      if (it == b.end()) throw EvalError("missing binding for " + e->var_name, to_string(e));
      return it->second;
    }
    case ExprOp::add: return eval(e->a, b) + eval(e->b, b);
    case ExprOp::sub: return eval(e->a, b) - eval(e->b, b);
    case ExprOp::mul: return eval(e->a, b) * eval(e->b, b);
    case ExprOp::div: {
      double den = eval(e->b, b);
      if (den == 0.0) throw EvalError("division by zero", to_string(e));
      return eval(e->a, b) / den;
    }
    case ExprOp::pow: {
      double base = eval(e->a, b);
      double ex = eval(e->b, b);
      if (base == 0.0 && ex < 0.0) throw EvalError("division by zero", to_string(e));
      if (base < 0.0 && ex != std::floor(ex))
        throw EvalError("fractional power of negative base", to_string(e));
      return std::pow(base, ex);
    }
    case ExprOp::neg:
      return -eval(e->a, b);
    case ExprOp::call: {
      double arg = eval(e->a, b);
      switch (e->fn) {
        case Builtin::sin: return std::sin(arg);
        case Builtin::cos: return std::cos(arg);
        case Builtin::exp: return std::exp(arg);
        case Builtin::log:
          if (arg <= 0.0) throw EvalError("log of non-positive value", to_string(e));
          return std::log(arg);
        case Builtin::sqrt:
          if (arg < 0.0) throw EvalError("sqrt of negative value", to_string(e));
          return std::sqrt(arg);
        case Builtin::abs: return std::abs(arg);
      }
    }
  }
  throw EvalError("malformed expression node", to_string(e));
}

}  // namespace

double evaluate(const Expr& e, const std::map<std::string, double>& bindings) {
  return eval(e, bindings);
}

namespace {

void collect_vars(const Expr& e, std::set<std::string>& out) {
  switch (e->op) {
    case ExprOp::number:
      return;
    case ExprOp::variable:
      out.insert(e->var_name);
      return;
    case ExprOp::neg:
    case ExprOp::call:
      collect_vars(e->a, out);
      return;
    default:
      collect_vars(e->a, out);
      collect_vars(e->b, out);
  }
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

Ternary is_zero(const Expr& e) {
  Expr s = simplify(e);
  if (s->op == ExprOp::number && s->num.is_zero()) return Ternary::provably_zero;

  auto vars = free_vars(s);
  if (vars.empty()) {
    // constant the folder could not close (e.g. 2^(1/2)); decide numerically
    try {
      return std::abs(evaluate(s, {})) > 1e-9 ? Ternary::provably_nonzero
                                              : Ternary::unknown;
    } catch (const EvalError&) {
      return Ternary::unknown;
    }
  }

  // rational sample points in general position, fixed seed for reproducibility
  std::mt19937 rng(0x0c11e7);
  std::uniform_int_distribution<int> num_d(2, 97);
  std::uniform_int_distribution<int> den_d(3, 31);
  std::uniform_int_distribution<int> sign_d(0, 1);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::map<std::string, double> point;
    for (const auto& v : vars) {
      double val = static_cast<double>(num_d(rng)) / static_cast<double>(den_d(rng));
      if (sign_d(rng)) val = -val;
      point[v] = val;
    }
    try {
      if (std::abs(evaluate(s, point)) > 1e-9) return Ternary::provably_nonzero;
    } catch (const EvalError&) {
      continue;  // sampled into a domain fault; retry elsewhere
    }
  }
  return Ternary::unknown;
}

LinearSplit split_linear(const Expr& e, const std::vector<std::string>& syms) {
  LinearSplit out;
  std::map<std::string, Expr> to_zero;
  for (const auto& s : syms) to_zero[s] = make_rational(0);
  out.constant = substitute(e, to_zero);
  for (const auto& s : syms) {
    Expr c = differentiate(e, s);
    auto fv = free_vars(c);
    for (const auto& other : syms)
      if (fv.count(other))
        throw std::runtime_error("expression is not linear in " + s);
    out.coeffs.push_back(c);
  }
  return out;
}

namespace {

// one canonical product term -> exponent vector + coefficient, or nullopt
std::optional<Monomial> term_monomial(const Expr& term, const VarAlphabet& alphabet) {
  Monomial m;
  m.exps.assign(alphabet.size(), 0);
  m.coeff = Number::integer(1);
  std::vector<Expr> stack{term};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (cur->op == ExprOp::mul) {
      stack.push_back(cur->a);
      stack.push_back(cur->b);
      continue;
    }
    if (cur->op == ExprOp::number) {
      m.coeff = Number::mul(m.coeff, cur->num);
      continue;
    }
    Expr base = cur;
    std::int64_t exp = 1;
    if (cur->op == ExprOp::pow) {
      if (cur->b->op != ExprOp::number || !cur->b->num.is_integer()) return std::nullopt;
      exp = cur->b->num.as_integer();
      base = cur->a;
    }
    if (base->op != ExprOp::variable || exp < 0) return std::nullopt;
    int rank = alphabet.rank_of(base->var_name);
    if (rank < 0) return std::nullopt;
    m.exps[rank] += static_cast<int>(exp);
  }
  return m;
}

}  // namespace

std::optional<std::vector<Monomial>> polynomial_coeffs(const Expr& e,
                                                       const VarAlphabet& alphabet) {
  Expr s = simplify(e);
  std::vector<Monomial> out;
  std::vector<Expr> terms;
  std::vector<Expr> stack{s};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (cur->op == ExprOp::add) {
      stack.push_back(cur->a);
      stack.push_back(cur->b);
    } else {
      terms.push_back(cur);
    }
  }
  for (const auto& t : terms) {
    auto m = term_monomial(t, alphabet);
    if (!m) return std::nullopt;
    if (m->coeff.is_zero()) continue;
    out.push_back(std::move(*m));
  }
  return out;
}

}  // namespace ocnoether
