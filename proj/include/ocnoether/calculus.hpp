#ifndef OCNOETHER_CALCULUS_HPP
#define OCNOETHER_CALCULUS_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocnoether/expr.hpp"

namespace ocnoether {

// Exact partial derivative with respect to the named variable; other
// variables are treated as independent symbols. Result is simplified.
Expr differentiate(const Expr& e, const std::string& v);

// Simultaneous substitution: occurrences of the keys in the original tree are
// replaced, replacements are never re-scanned. Result is simplified.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

// Raised on a missing binding or a domain fault (log of a non-positive value,
// division by zero, sqrt of a negative, fractional power of a negative base).
// `where` is the offending subtree, printed.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::string where_)
      : std::runtime_error(what + " in: " + where_), where(std::move(where_)) {}
  std::string where;
};

double evaluate(const Expr& e, const std::map<std::string, double>& bindings);

std::set<std::string> free_vars(const Expr& e);

enum class Ternary { provably_zero, provably_nonzero, unknown };

// provably_zero when the canonical form is the literal 0; provably_nonzero
// when a deterministic rational sample point in general position gives
// |value| > 1e-9; unknown otherwise (conservative: never guesses zero).
Ternary is_zero(const Expr& e);

// Linear split e = c0 + sum coeff_k * sym_k, for expressions known to be
// linear in the given symbols. Coefficients must not mention any sym; throws
// std::runtime_error otherwise.
struct LinearSplit {
  Expr constant;
  std::vector<Expr> coeffs;  // aligned with syms
};
LinearSplit split_linear(const Expr& e, const std::vector<std::string>& syms);

// Multivariate polynomial view in the alphabet's variables: exponent vector
// (alphabet order) -> coefficient. nullopt when the canonical form is not a
// polynomial (function calls, negative/fractional powers, symbolic exponents).
struct Monomial {
  std::vector<int> exps;
  Number coeff;
};
std::optional<std::vector<Monomial>> polynomial_coeffs(const Expr& e,
                                                       const VarAlphabet& alphabet);

}  // namespace ocnoether

#endif
