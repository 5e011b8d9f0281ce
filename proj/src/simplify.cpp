#include "ocnoether/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ocnoether {

namespace {

bool is_number(const Expr& e) { return e->op == ExprOp::number; }

// exact square root of a rational, if it exists
std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r.is_negative()) return std::nullopt;
  auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
    if (v < 0) return std::nullopt;
    auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, root - 2); c <= root + 2; ++c)
      if (c * c == v) return c;
    return std::nullopt;
  };
  auto n = isqrt(r.num());
  auto d = isqrt(r.den());
  if (!n || !d) return std::nullopt;
  return Rational::make(*n, *d);
}

}  // namespace

std::optional<Expr> fold_binary(ExprOp op, const Expr& a, const Expr& b) {
  if (!is_number(a) || !is_number(b)) return std::nullopt;
  const Number& x = a->num;
  const Number& y = b->num;
  switch (op) {
    case ExprOp::add: return make_number(Number::add(x, y));
    case ExprOp::sub: return make_number(Number::sub(x, y));
    case ExprOp::mul: return make_number(Number::mul(x, y));
    case ExprOp::div:
      if (y.is_zero()) throw SimplifyError("division by literal zero");
      return make_number(Number::div(x, y));
    case ExprOp::pow:
      if (x.is_zero() && y.is_negative())
        throw SimplifyError("zero raised to a negative power");
      if (y.is_integer()) return make_number(Number::pow(x, y));
      if (!x.exact() && !y.exact()) return make_number(Number::pow(x, y));
      return std::nullopt;  // e.g. 2^(1/2): keep symbolic, stay exact
    default: return std::nullopt;
  }
}

std::optional<Expr> fold_neg(const Expr& a) {
  if (!is_number(a)) return std::nullopt;
  return make_number(Number::neg(a->num));
}

std::optional<Expr> fold_call(Builtin fn, const Expr& a) {
  if (!is_number(a)) return std::nullopt;
  const Number& x = a->num;
  switch (fn) {
    case Builtin::sin:
      if (x.is_zero()) return make_rational(0);
      break;
    case Builtin::cos:
      if (x.is_zero()) return make_rational(1);
      break;
    case Builtin::exp:
      if (x.is_zero()) return make_rational(1);
      break;
    case Builtin::log:
      if (x.is_one()) return make_rational(0);
      break;
    case Builtin::sqrt:
      if (x.exact()) {
        if (auto r = exact_sqrt(x.rat())) return make_number(Number::rational(*r));
      } else if (x.value() >= 0.0) {
        return make_real(std::sqrt(x.value()));
      }
      break;
    case Builtin::abs:
      if (x.exact()) {
        return x.is_negative() ? make_number(Number::neg(x)) : a;
      }
      return make_real(std::abs(x.value()));
  }
  return std::nullopt;
}

namespace {

struct Factor {
  Expr base;
  Expr exp;  // canonical; Number(1) for a bare factor
};

// one product term: coeff * base1^e1 * base2^e2 * ...
struct PTerm {
  Number coeff;
  std::vector<Factor> factors;
};

Expr simp(const Expr& e);

Expr factor_expr(const Factor& f) {
  if (is_number(f.exp) && f.exp->num.is_one()) return f.base;
  return make_binary(ExprOp::pow, f.base, f.exp);
}

Expr rebuild_product(const Number& coeff, const std::vector<Factor>& fs) {
  if (fs.empty()) return make_number(coeff);
  Expr chain;
  std::size_t i = 0;
  if (coeff.is_one()) {
    chain = factor_expr(fs[0]);
    i = 1;
  } else {
    chain = make_number(coeff);
  }
  for (; i < fs.size(); ++i)
    chain = make_binary(ExprOp::mul, chain, factor_expr(fs[i]));
  return chain;
}

Expr mono_expr(const PTerm& t) {
  return rebuild_product(Number::integer(1), t.factors);
}

Expr term_expr(const PTerm& t) { return rebuild_product(t.coeff, t.factors); }

// sort factors, merge equal bases, fold numeric factors into the coefficient
void normalize_factors(PTerm& t) {
  auto& fs = t.factors;
  std::stable_sort(fs.begin(), fs.end(),
                   [](const Factor& a, const Factor& b) { return expr_less(a.base, b.base); });
  std::vector<Factor> merged;
  for (auto& f : fs) {
    if (!merged.empty() && structural_equal(merged.back().base, f.base)) {
      merged.back().exp =
          simp(make_binary(ExprOp::add, merged.back().exp, f.exp));
    } else {
      merged.push_back(f);
    }
  }
  std::vector<Factor> out;
  for (auto& f : merged) {
    if (is_number(f.exp) && f.exp->num.is_zero()) continue;  // base^0
    if (is_number(f.base)) {
      if (f.base->num.is_one()) continue;  // 1^e
      if (is_number(f.exp)) {
        if (auto folded = fold_binary(ExprOp::pow, f.base, f.exp)) {
          t.coeff = Number::mul(t.coeff, (*folded)->num);
          continue;
        }
      }
    }
    out.push_back(std::move(f));
  }
  fs = std::move(out);
  if (t.coeff.is_zero()) fs.clear();
}

PTerm mul_pterm(const PTerm& a, const PTerm& b) {
  PTerm r;
  r.coeff = Number::mul(a.coeff, b.coeff);
  r.factors = a.factors;
  r.factors.insert(r.factors.end(), b.factors.begin(), b.factors.end());
  normalize_factors(r);
  return r;
}

std::vector<PTerm> mul_term_lists(const std::vector<PTerm>& a,
                                  const std::vector<PTerm>& b) {
  std::vector<PTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& ta : a)
    for (const auto& tb : b) out.push_back(mul_pterm(ta, tb));
  return out;
}

Expr rebuild_sum(std::vector<PTerm> terms) {
  // merge identical monomials, drop zero coefficients, order deterministically
  std::vector<std::pair<Expr, PTerm>> keyed;
  keyed.reserve(terms.size());
  for (auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    keyed.emplace_back(mono_expr(t), std::move(t));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return expr_less(a.first, b.first); });
  std::vector<PTerm> merged;
  std::vector<Expr> merged_keys;
  for (auto& [key, t] : keyed) {
    if (!merged.empty() && structural_equal(merged_keys.back(), key)) {
      merged.back().coeff = Number::add(merged.back().coeff, t.coeff);
    } else {
      merged.push_back(std::move(t));
      merged_keys.push_back(key);
    }
  }
  Expr chain;
  for (const auto& t : merged) {
    if (t.coeff.is_zero()) continue;
    Expr te = term_expr(t);
    chain = chain ? make_binary(ExprOp::add, chain, te) : te;
  }
  return chain ? chain : make_rational(0);
}

// canonical expr -> term list (a sum flattens to several terms)
void collect_terms(const Expr& e, std::vector<PTerm>& out) {
  if (e->op == ExprOp::add) {
    collect_terms(e->a, out);
    collect_terms(e->b, out);
    return;
  }
  PTerm t;
  t.coeff = Number::integer(1);
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (cur->op == ExprOp::mul) {
      stack.push_back(cur->a);
      stack.push_back(cur->b);
    } else if (cur->op == ExprOp::number) {
      t.coeff = Number::mul(t.coeff, cur->num);
    } else if (cur->op == ExprOp::pow) {
      t.factors.push_back({cur->a, cur->b});
    } else {
      t.factors.push_back({cur, make_rational(1)});
    }
  }
  normalize_factors(t);
  out.push_back(std::move(t));
}

std::vector<PTerm> term_list(const Expr& canonical) {
  std::vector<PTerm> out;
  collect_terms(canonical, out);
  return out;
}

std::vector<PTerm> negate_terms(std::vector<PTerm> ts) {
  for (auto& t : ts) t.coeff = Number::neg(t.coeff);
  return ts;
}

constexpr int kMaxExpandPower = 16;

Expr simp_pow(const Expr& p, const Expr& q) {
  if (auto f = fold_binary(ExprOp::pow, p, q)) return *f;
  if (is_number(q)) {
    const Number& n = q->num;
    if (n.is_zero()) return make_rational(1);  // x^0 -> 1 (0^0 handled above)
    if (n.is_one()) return p;
    if (is_number(p)) {
      if (p->num.is_one()) return make_rational(1);
      if (p->num.is_zero()) {
        if (n.is_negative()) throw SimplifyError("zero raised to a negative power");
        return make_rational(0);
      }
      return make_binary(ExprOp::pow, p, q);  // e.g. 2^(1/2)
    }
    if (n.is_integer()) {
      std::int64_t k = n.as_integer();
      if (p->op == ExprOp::add) {
        if (k >= 2 && k <= kMaxExpandPower) {
          auto base_terms = term_list(p);
          auto acc = base_terms;
          for (std::int64_t i = 1; i < k; ++i) acc = mul_term_lists(acc, base_terms);
          return rebuild_sum(std::move(acc));
        }
        return make_binary(ExprOp::pow, p, q);
      }
      // single product term: distribute the integer exponent over its parts
      auto ts = term_list(p);
      PTerm t = std::move(ts.front());
      PTerm r;
      r.coeff = Number::pow(t.coeff, n);
      for (auto& f : t.factors) {
        Expr e2 = simp(make_binary(ExprOp::mul, f.exp, q));
        r.factors.push_back({f.base, e2});
      }
      normalize_factors(r);
      return rebuild_sum({std::move(r)});
    }
    // non-integer constant exponent: no power merging — (b^m)^c = b^(m*c)
    // is false for even m and negative b, e.g. (t^2)^(1/2) != t
    return make_binary(ExprOp::pow, p, q);
  }
  // symbolic exponent
  if (is_number(p) && p->num.is_one()) return make_rational(1);
  return make_binary(ExprOp::pow, p, q);
}

Expr simp(const Expr& e) {
  switch (e->op) {
    case ExprOp::number:
    case ExprOp::variable:
      return e;
    case ExprOp::add: {
      auto ts = term_list(simp(e->a));
      auto tb = term_list(simp(e->b));
      ts.insert(ts.end(), tb.begin(), tb.end());
      return rebuild_sum(std::move(ts));
    }
    case ExprOp::sub: {
      auto ts = term_list(simp(e->a));
      auto tb = negate_terms(term_list(simp(e->b)));
      ts.insert(ts.end(), tb.begin(), tb.end());
      return rebuild_sum(std::move(ts));
    }
    case ExprOp::neg:
      return rebuild_sum(negate_terms(term_list(simp(e->a))));
    case ExprOp::mul:
      return rebuild_sum(mul_term_lists(term_list(simp(e->a)), term_list(simp(e->b))));
    case ExprOp::div: {
      Expr denom = simp(e->b);
      std::vector<PTerm> inv;
      auto dts = term_list(denom);
      if (dts.size() == 1) {
        PTerm& d = dts.front();
        if (d.coeff.is_zero() && d.factors.empty())
          throw SimplifyError("division by literal zero");
        PTerm r;
        r.coeff = Number::div(Number::integer(1), d.coeff);
        for (auto& f : d.factors)
          r.factors.push_back({f.base, simp(make_neg(f.exp))});
        normalize_factors(r);
        inv.push_back(std::move(r));
      } else {
        PTerm r;
        r.coeff = Number::integer(1);
        r.factors.push_back({denom, make_rational(-1)});
        inv.push_back(std::move(r));
      }
      return rebuild_sum(mul_term_lists(term_list(simp(e->a)), inv));
    }
    case ExprOp::pow:
      return simp_pow(simp(e->a), simp(e->b));
    case ExprOp::call: {
      Expr arg = simp(e->a);
      if (auto f = fold_call(e->fn, arg)) return *f;
      if (e->fn == Builtin::log && arg->op == ExprOp::call && arg->fn == Builtin::exp)
        return arg->a;
      if (e->fn == Builtin::abs && arg->op == ExprOp::call && arg->fn == Builtin::abs)
        return arg;
      return make_call(e->fn, arg);
    }
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) { return simp(e); }

}  // namespace ocnoether
