#ifndef OCNOETHER_EXPR_HPP
#define OCNOETHER_EXPR_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocnoether/rational.hpp"

namespace ocnoether {

// Scalar constant: exact rational until a float enters the computation, then
// double. Value-equality (and the hash) go through the double image so that
// mixed comparisons behave.
class Number {
 public:
  Number() : exact_(true), rat_(0) {}
  static Number rational(Rational r) {
    Number n;
    n.exact_ = true;
    n.rat_ = r;
    return n;
  }
  static Number real(double d) {
    Number n;
    n.exact_ = false;
    n.dbl_ = d;
    return n;
  }
  static Number integer(std::int64_t i) { return rational(Rational(i)); }

  bool exact() const { return exact_; }
  const Rational& rat() const { return rat_; }
  double value() const { return exact_ ? rat_.to_double() : dbl_; }

  bool is_zero() const { return exact_ ? rat_.is_zero() : dbl_ == 0.0; }
  bool is_one() const { return exact_ ? rat_.is_one() : dbl_ == 1.0; }
  bool is_integer() const;
  std::int64_t as_integer() const;  // valid only when is_integer()
  bool is_negative() const { return exact_ ? rat_.is_negative() : dbl_ < 0.0; }

  static Number add(const Number& a, const Number& b);
  static Number sub(const Number& a, const Number& b);
  static Number mul(const Number& a, const Number& b);
  static Number div(const Number& a, const Number& b);  // caller checks b != 0
  static Number neg(const Number& a);
  // Exact when base rational and exponent a small integer; otherwise double.
  static Number pow(const Number& base, const Number& exp);

  bool equals(const Number& o) const;
  std::string str() const;

 private:
  bool exact_;
  Rational rat_;
  double dbl_ = 0.0;
};

enum class ExprOp : std::uint8_t {
  number,
  variable,
  add,
  sub,
  mul,
  div,
  pow,
  neg,
  call,
};

enum class Builtin : std::uint8_t { sin, cos, exp, log, sqrt, abs };

const char* builtin_name(Builtin f);

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
 public:
  ExprOp op;
  Number num;            // op == number
  std::string var_name;  // op == variable
  int var_rank = -1;     // position in the declaring alphabet
  Builtin fn = Builtin::sin;
  Expr a, b;  // children; b empty for unary ops

  std::size_t hash = 0;
};

// Node builders (no simplification).
Expr make_number(Number n);
Expr make_rational(std::int64_t num, std::int64_t den = 1);
Expr make_real(double d);
Expr make_variable(const std::string& name, int rank);
Expr make_binary(ExprOp op, Expr a, Expr b);
Expr make_neg(Expr a);
Expr make_call(Builtin fn, Expr a);

inline Expr operator+(Expr a, Expr b) { return make_binary(ExprOp::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return make_binary(ExprOp::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return make_binary(ExprOp::mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return make_binary(ExprOp::div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return make_neg(std::move(a)); }
Expr pow(Expr base, Expr exp);
Expr pow(Expr base, std::int64_t exp);

bool structural_equal(const Expr& a, const Expr& b);

// Deterministic total order: numbers < variables (by alphabet rank) <
// compound nodes (by op, then children). Used for canonical operand ordering.
bool expr_less(const Expr& a, const Expr& b);

// Faithful text form: reparsing the output of a simplified expression yields
// a structurally identical tree.
std::string to_string(const Expr& e);

class AlphabetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered variable alphabet. The canonical alphabet of an n-state, m-control
// problem is (t, x1..xn, u1..um, psi1..psin, s); rate symbols x<i>dot,
// u<j>dot, psi<i>dot extend it when total time derivatives stay formal.
class VarAlphabet {
 public:
  VarAlphabet() = default;
  explicit VarAlphabet(std::vector<std::string> names);

  static VarAlphabet canonical(int n_states, int n_controls);

  // Same ranks for the canonical prefix, rate symbols appended.
  VarAlphabet with_rates() const;

  VarAlphabet extended(const std::vector<std::string>& extra) const;

  bool contains(const std::string& name) const { return rank_of(name) >= 0; }
  int rank_of(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  Expr var(const std::string& name) const;  // throws AlphabetError if unknown

 private:
  std::vector<std::string> names_;
};

}  // namespace ocnoether

#endif
