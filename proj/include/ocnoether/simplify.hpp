#ifndef OCNOETHER_SIMPLIFY_HPP
#define OCNOETHER_SIMPLIFY_HPP

#include <optional>
#include <stdexcept>

#include "ocnoether/expr.hpp"

namespace ocnoether {

class SimplifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical form. Fixed rule set, applied to a fixed point:
//  - constant folding (exact rational until a float enters),
//  - 0/1 identities, double negation,
//  - subtraction/division/negation rewritten into sums of coefficient*product
//    terms with rational exponents,
//  - products distributed over sums, integer powers of sums expanded,
//  - identical monomials collected, commutative operands ordered by alphabet
//    rank and structural order.
// Idempotent: simplify(simplify(e)) == simplify(e).
// Throws SimplifyError on division by a literal zero.
Expr simplify(const Expr& e);

// Constant-fold a single operation when every operand is a literal constant.
// Shared by the parser and the simplifier so both produce identical nodes.
// nullopt when not a constant pair / not exactly foldable.
std::optional<Expr> fold_binary(ExprOp op, const Expr& a, const Expr& b);
std::optional<Expr> fold_neg(const Expr& a);
std::optional<Expr> fold_call(Builtin fn, const Expr& a);

}  // namespace ocnoether

#endif
