#include "ocnoether/expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace ocnoether {

bool Number::is_integer() const {
  if (exact_) return rat_.is_integer();
  return std::isfinite(dbl_) && dbl_ == std::floor(dbl_) && std::abs(dbl_) < 9.0e15;
}

std::int64_t Number::as_integer() const {
  return exact_ ? rat_.num() : static_cast<std::int64_t>(dbl_);
}

Number Number::add(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::add(a.rat_, b.rat_)) return rational(*r);
  }
  return real(a.value() + b.value());
}

Number Number::sub(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::sub(a.rat_, b.rat_)) return rational(*r);
  }
  return real(a.value() - b.value());
}

Number Number::mul(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::mul(a.rat_, b.rat_)) return rational(*r);
  }
  return real(a.value() * b.value());
}

Number Number::div(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::div(a.rat_, b.rat_)) return rational(*r);
  }
  return real(a.value() / b.value());
}

Number Number::neg(const Number& a) {
  if (a.exact_) {
    if (auto r = a.rat_.negated()) return rational(*r);
  }
  return real(-a.value());
}

Number Number::pow(const Number& base, const Number& exp) {
  if (base.exact_ && exp.exact_ && exp.rat_.is_integer()) {
    if (auto r = base.rat_.pow_int(exp.rat_.num())) return rational(*r);
  }
  return real(std::pow(base.value(), exp.value()));
}

bool Number::equals(const Number& o) const {
  if (exact_ && o.exact_) return rat_ == o.rat_;
  return value() == o.value();
}

std::string Number::str() const {
  if (exact_) return rat_.str();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", dbl_);
  // guarantee reparseable token (avoid "inf"/"nan" entering expressions)
  if (!std::isfinite(dbl_)) return "(0/0)";
  return buf;
}

const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::sin: return "sin";
    case Builtin::cos: return "cos";
    case Builtin::exp: return "exp";
    case Builtin::log: return "log";
    case Builtin::sqrt: return "sqrt";
    case Builtin::abs: return "abs";
  }
  return "?";
}

namespace {

constexpr std::size_t kFnvOffset = 1469598103934665603ULL;
constexpr std::size_t kFnvPrime = 1099511628211ULL;

std::size_t fnv(std::size_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::size_t hash_of(const ExprNode& n) {
  std::size_t h = kFnvOffset;
  auto op = static_cast<std::uint8_t>(n.op);
  h = fnv(h, &op, 1);
  switch (n.op) {
    case ExprOp::number: {
      double v = n.num.value();
      h = fnv(h, &v, sizeof(v));
      break;
    }
    case ExprOp::variable:
      h = fnv(h, n.var_name.data(), n.var_name.size());
      break;
    case ExprOp::call: {
      auto f = static_cast<std::uint8_t>(n.fn);
      h = fnv(h, &f, 1);
      h = fnv(h, &n.a->hash, sizeof(std::size_t));
      break;
    }
    case ExprOp::neg:
      h = fnv(h, &n.a->hash, sizeof(std::size_t));
      break;
    default:
      h = fnv(h, &n.a->hash, sizeof(std::size_t));
      h = fnv(h, &n.b->hash, sizeof(std::size_t));
      break;
  }
  return h;
}

}  // namespace

Expr make_number(Number n) {
  auto node = std::make_shared<ExprNode>();
  node->op = ExprOp::number;
  node->num = n;
  node->hash = hash_of(*node);
  return node;
}

Expr make_rational(std::int64_t num, std::int64_t den) {
  auto r = Rational::make(num, den);
  if (!r) return make_real(static_cast<double>(num) / static_cast<double>(den));
  return make_number(Number::rational(*r));
}

Expr make_real(double d) { return make_number(Number::real(d)); }

Expr make_variable(const std::string& name, int rank) {
  auto node = std::make_shared<ExprNode>();
  node->op = ExprOp::variable;
  node->var_name = name;
  node->var_rank = rank;
  node->hash = hash_of(*node);
  return node;
}

Expr make_binary(ExprOp op, Expr a, Expr b) {
  auto node = std::make_shared<ExprNode>();
  node->op = op;
  node->a = std::move(a);
  node->b = std::move(b);
  node->hash = hash_of(*node);
  return node;
}

Expr make_neg(Expr a) {
  auto node = std::make_shared<ExprNode>();
  node->op = ExprOp::neg;
  node->a = std::move(a);
  node->hash = hash_of(*node);
  return node;
}

Expr make_call(Builtin fn, Expr a) {
  auto node = std::make_shared<ExprNode>();
  node->op = ExprOp::call;
  node->fn = fn;
  node->a = std::move(a);
  node->hash = hash_of(*node);
  return node;
}

Expr pow(Expr base, Expr exp) {
  return make_binary(ExprOp::pow, std::move(base), std::move(exp));
}

Expr pow(Expr base, std::int64_t exp) {
  return pow(std::move(base), make_rational(exp));
}

bool structural_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->op != b->op) return false;
  switch (a->op) {
    case ExprOp::number: return a->num.equals(b->num);
    case ExprOp::variable: return a->var_name == b->var_name;
    case ExprOp::call:
      return a->fn == b->fn && structural_equal(a->a, b->a);
    case ExprOp::neg: return structural_equal(a->a, b->a);
    default:
      return structural_equal(a->a, b->a) && structural_equal(a->b, b->b);
  }
}

namespace {

int op_class(const ExprNode& n) {
  switch (n.op) {
    case ExprOp::number: return 0;
    case ExprOp::variable: return 1;
    default: return 2;
  }
}

// three-way structural compare, total and deterministic
int expr_cmp(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  int ca = op_class(*a), cb = op_class(*b);
  if (ca != cb) return ca < cb ? -1 : 1;
  if (ca == 0) {
    double va = a->num.value(), vb = b->num.value();
    if (va < vb) return -1;
    if (va > vb) return 1;
    return 0;
  }
  if (ca == 1) {
    if (a->var_rank != b->var_rank) return a->var_rank < b->var_rank ? -1 : 1;
    return a->var_name.compare(b->var_name) < 0   ? -1
           : a->var_name.compare(b->var_name) > 0 ? 1
                                                  : 0;
  }
  if (a->op != b->op)
    return static_cast<int>(a->op) < static_cast<int>(b->op) ? -1 : 1;
  if (a->op == ExprOp::call && a->fn != b->fn)
    return static_cast<int>(a->fn) < static_cast<int>(b->fn) ? -1 : 1;
  int c = expr_cmp(a->a, b->a);
  if (c != 0) return c;
  if (a->b && b->b) return expr_cmp(a->b, b->b);
  if (a->b) return 1;
  if (b->b) return -1;
  return 0;
}

}  // namespace

bool expr_less(const Expr& a, const Expr& b) { return expr_cmp(a, b) < 0; }

namespace {

// Printer precedence levels, matching the grammar:
// sum(0) < product(1) < unary-minus(2) < power(3) < atom(4).
int print_prec(const ExprNode& n) {
  switch (n.op) {
    case ExprOp::add:
    case ExprOp::sub: return 0;
    case ExprOp::mul:
    case ExprOp::div: return 1;
    case ExprOp::neg: return 2;
    case ExprOp::pow: return 3;
    case ExprOp::number:
      if (n.num.exact() && !n.num.rat().is_integer()) return 1;  // "a/b"
      if (n.num.is_negative()) return 2;      // prints with leading '-'
      return 4;
    default: return 4;  // variable, call
  }
}

void print(const Expr& e, int parent_prec, std::string& out) {
  int prec = print_prec(*e);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (e->op) {
    case ExprOp::number: out += e->num.str(); break;
    case ExprOp::variable: out += e->var_name; break;
    case ExprOp::add:
      print(e->a, 0, out);
      out += " + ";
      print(e->b, 1, out);
      break;
    case ExprOp::sub:
      print(e->a, 0, out);
      out += " - ";
      print(e->b, 1, out);
      break;
    case ExprOp::mul:
      print(e->a, 1, out);
      out += '*';
      print(e->b, 2, out);
      break;
    case ExprOp::div:
      print(e->a, 1, out);
      out += '/';
      print(e->b, 2, out);
      break;
    case ExprOp::neg:
      out += '-';
      print(e->a, 2, out);
      break;
    case ExprOp::pow:
      print(e->a, 4, out);
      out += '^';
      // exponent must reparse as a single factor
      if (e->b->op == ExprOp::variable ||
          (e->b->op == ExprOp::number && !e->b->num.is_negative() &&
           e->b->num.exact() && e->b->num.rat().is_integer())) {
        print(e->b, 0, out);
      } else {
        out += '(';
        print(e->b, 0, out);
        out += ')';
      }
      break;
    case ExprOp::call:
      out += builtin_name(e->fn);
      out += '(';
      print(e->a, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

VarAlphabet::VarAlphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j])
        throw AlphabetError("duplicate variable name '" + names_[i] + "'");
}

VarAlphabet VarAlphabet::canonical(int n_states, int n_controls) {
  std::vector<std::string> names;
  names.push_back("t");
  for (int i = 1; i <= n_states; ++i) names.push_back("x" + std::to_string(i));
  for (int j = 1; j <= n_controls; ++j) names.push_back("u" + std::to_string(j));
  for (int i = 1; i <= n_states; ++i) names.push_back("psi" + std::to_string(i));
  names.push_back("s");
  return VarAlphabet(std::move(names));
}

VarAlphabet VarAlphabet::with_rates() const {
  std::vector<std::string> extra;
  for (const auto& n : names_) {
    if (n == "t" || n == "s") continue;
    extra.push_back(n + "dot");
  }
  return extended(extra);
}

VarAlphabet VarAlphabet::extended(const std::vector<std::string>& extra) const {
  std::vector<std::string> names = names_;
  for (const auto& n : extra) names.push_back(n);
  return VarAlphabet(std::move(names));
}

int VarAlphabet::rank_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

Expr VarAlphabet::var(const std::string& name) const {
  int r = rank_of(name);
  if (r < 0) throw AlphabetError("unknown variable '" + name + "'");
  return make_variable(name, r);
}

}  // namespace ocnoether
