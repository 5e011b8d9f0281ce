#include "ocnoether/parse.hpp"

#include <cctype>
#include <cstdint>
#include <optional>

#include "ocnoether/simplify.hpp"

namespace ocnoether {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
};

class Parser {
 public:
  Parser(const std::string& text, const VarAlphabet& alphabet)
      : lex_{text}, alphabet_(alphabet) {}

  Expr run() {
    Expr e = parse_expr();
    if (!lex_.eof())
      throw ParseError(std::string("unexpected '") + lex_.peek() + "'", lex_.pos);
    return e;
  }

 private:
  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      if (lex_.consume('+'))
        e = combine(ExprOp::add, e, parse_term());
      else if (lex_.consume('-'))
        e = combine(ExprOp::sub, e, parse_term());
      else
        break;
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (true) {
      if (lex_.consume('*'))
        e = combine(ExprOp::mul, e, parse_factor());
      else if (lex_.consume('/'))
        e = combine(ExprOp::div, e, parse_factor());
      else
        break;
    }
    return e;
  }

  Expr parse_factor() {
    // '-' binds looser than '^': -x^2 is -(x^2)
    if (lex_.consume('-')) {
      Expr inner = parse_factor();
      if (auto f = fold_neg(inner)) return *f;
      return make_neg(inner);
    }
    Expr base = parse_base();
    if (lex_.consume('^')) {
      Expr exp = parse_factor();  // right-associative
      return combine(ExprOp::pow, base, exp);
    }
    return base;
  }

  Expr parse_base() {
    if (lex_.eof()) throw ParseError("unexpected end of expression", lex_.pos);
    char c = lex_.peek();
    if (c == '(') {
      lex_.consume('(');
      Expr e = parse_expr();
      if (!lex_.consume(')')) throw ParseError("expected ')'", lex_.pos);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected '") + c + "'", lex_.pos);
  }

  Expr parse_number() {
    std::size_t start = lex_.pos;
    std::int64_t mantissa = 0;
    int frac_digits = 0;
    bool overflow = false, any_digit = false;
    auto push_digit = [&](char d) {
      any_digit = true;
      if (overflow) return;
      if (mantissa > (INT64_MAX - (d - '0')) / 10) {
        overflow = true;
        return;
      }
      mantissa = mantissa * 10 + (d - '0');
    };
    const std::string& s = lex_.text;
    while (lex_.pos < s.size() && std::isdigit(static_cast<unsigned char>(s[lex_.pos])))
      push_digit(s[lex_.pos++]);
    if (lex_.pos < s.size() && s[lex_.pos] == '.') {
      ++lex_.pos;
      while (lex_.pos < s.size() && std::isdigit(static_cast<unsigned char>(s[lex_.pos]))) {
        push_digit(s[lex_.pos]);
        ++frac_digits;
        ++lex_.pos;
      }
    }
    int exp10 = 0;
    if (lex_.pos < s.size() && (s[lex_.pos] == 'e' || s[lex_.pos] == 'E')) {
      std::size_t mark = lex_.pos;
      ++lex_.pos;
      bool neg = false;
      if (lex_.pos < s.size() && (s[lex_.pos] == '+' || s[lex_.pos] == '-')) {
        neg = s[lex_.pos] == '-';
        ++lex_.pos;
      }
      if (lex_.pos < s.size() && std::isdigit(static_cast<unsigned char>(s[lex_.pos]))) {
        while (lex_.pos < s.size() && std::isdigit(static_cast<unsigned char>(s[lex_.pos]))) {
          if (exp10 < 10000) exp10 = exp10 * 10 + (s[lex_.pos] - '0');
          ++lex_.pos;
        }
        if (neg) exp10 = -exp10;
      } else {
        lex_.pos = mark;  // 'e' belongs to something else; not part of the literal
      }
    }
    if (!any_digit) throw ParseError("malformed number", start);

    int net = exp10 - frac_digits;
    // Exactness window: mantissa and scale must both be exactly representable
    // as doubles so the rational's double image matches strtod of the same
    // token (keeps printed doubles value-stable across a reparse).
    if (!overflow && mantissa <= (std::int64_t{1} << 53) && net >= -15 && net <= 15) {
      Rational r(mantissa);
      Rational ten(10);
      auto scale = ten.pow_int(net < 0 ? -net : net);
      if (scale) {
        auto v = net >= 0 ? Rational::mul(r, *scale) : Rational::div(r, *scale);
        if (v) return make_number(Number::rational(*v));
      }
    }
    return make_real(std::stod(s.substr(start, lex_.pos - start)));
  }

  Expr parse_ident() {
    std::size_t start = lex_.pos;
    const std::string& s = lex_.text;
    while (lex_.pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[lex_.pos]))))
      ++lex_.pos;
    std::string name = s.substr(start, lex_.pos - start);
    if (lex_.peek() == '(') {
      std::optional<Builtin> fn;
      for (Builtin f : {Builtin::sin, Builtin::cos, Builtin::exp, Builtin::log,
                        Builtin::sqrt, Builtin::abs})
        if (name == builtin_name(f)) fn = f;
      if (!fn) throw ParseError("unknown function '" + name + "'", start);
      lex_.consume('(');
      Expr arg = parse_expr();
      if (!lex_.consume(')')) throw ParseError("expected ')'", lex_.pos);
      if (auto f = fold_call(*fn, arg)) return *f;
      return make_call(*fn, arg);
    }
    int rank = alphabet_.rank_of(name);
    if (rank < 0) throw UnknownVariableError(name, start);
    return make_variable(name, rank);
  }

  Expr combine(ExprOp op, const Expr& a, const Expr& b) {
    if (auto f = fold_binary(op, a, b)) return *f;
    return make_binary(op, a, b);
  }

  Lexer lex_;
  const VarAlphabet& alphabet_;
};

}  // namespace

Expr parse(const std::string& text, const VarAlphabet& alphabet) {
  return Parser(text, alphabet).run();
}

}  // namespace ocnoether
