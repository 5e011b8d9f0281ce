#ifndef OCNOETHER_TAPE_HPP
#define OCNOETHER_TAPE_HPP

#include <cstddef>
#include <vector>

#include "ocnoether/expr.hpp"

namespace ocnoether {

// Expression compiled to a flat postfix program for fast repeated evaluation
// over grids. Unlike tree evaluation (which throws on domain faults), tape
// evaluation is total: faults surface as IEEE non-finite values the caller
// can count and skip. The same program run over the same inputs is
// bit-identical regardless of thread count (one independent stack per point,
// no reductions).
class CompiledExpr {
 public:
  enum class Op : std::uint8_t {
    push_const,
    push_var,
    add,
    sub,
    mul,
    div,
    pow_op,
    neg,
    call_fn,
  };
  struct Instr {
    Op op;
    double cnst = 0.0;
    int var = -1;  // column index = alphabet rank
    Builtin fn = Builtin::sin;
  };

  std::vector<Instr> prog;
  int n_vars = 0;
  int stack_need = 0;

  // vars: one value per alphabet slot (row layout)
  double eval(const double* vars) const;
};

// Compiles against the alphabet's ranks; every variable in e must be known.
CompiledExpr compile(const Expr& e, const VarAlphabet& alphabet);

// Grid evaluation: `vars` holds npoints rows of ce.n_vars doubles
// (row-major); out receives npoints values.
void eval_grid_serial(const CompiledExpr& ce, const double* vars,
                      std::size_t npoints, double* out);
// OpenMP version; documented bit-identical to the serial reference.
void eval_grid_parallel(const CompiledExpr& ce, const double* vars,
                        std::size_t npoints, double* out);
// Default entry point: parallel when built with OpenMP, else serial.
void eval_grid(const CompiledExpr& ce, const double* vars, std::size_t npoints,
               double* out);

}  // namespace ocnoether

#endif
