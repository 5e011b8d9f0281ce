#ifndef OCNOETHER_PARSE_HPP
#define OCNOETHER_PARSE_HPP

#include <stdexcept>
#include <string>

#include "ocnoether/expr.hpp"

namespace ocnoether {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class UnknownVariableError : public ParseError {
 public:
  UnknownVariableError(const std::string& name, std::size_t pos)
      : ParseError("unknown variable '" + name + "'", pos), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')' | '-' base
// with the usual precedence (^ right-associative, the rest left-associative),
// no implicit multiplication. Numeric literals become exact rationals where
// representable. Operations whose operands are both literal constants fold to
// a single constant, so printed constants such as "2/3" or "-1" reparse to the
// constant node itself.
Expr parse(const std::string& text, const VarAlphabet& alphabet);

}  // namespace ocnoether

#endif
