#include "ocnoether/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace ocnoether {

namespace {

// returns the stack depth needed by the subtree
int emit(const Expr& e, const VarAlphabet& ab, std::vector<CompiledExpr::Instr>& prog) {
  using Op = CompiledExpr::Op;
  switch (e->op) {
    case ExprOp::number:
      prog.push_back({Op::push_const, e->num.value(), -1, Builtin::sin});
      return 1;
    case ExprOp::variable: {
      int rank = ab.rank_of(e->var_name);
      if (rank < 0)
        throw AlphabetError("compile: variable '" + e->var_name +
                            "' not in alphabet");
      prog.push_back({Op::push_var, 0.0, rank, Builtin::sin});
      return 1;
    }
    case ExprOp::neg: {
      int d = emit(e->a, ab, prog);
      prog.push_back({Op::neg, 0.0, -1, Builtin::sin});
      return d;
    }
    case ExprOp::call: {
      int d = emit(e->a, ab, prog);
      prog.push_back({Op::call_fn, 0.0, -1, e->fn});
      return d;
    }
    default: {
      int da = emit(e->a, ab, prog);
      int db = emit(e->b, ab, prog);
      Op op = Op::add;
      switch (e->op) {
        case ExprOp::add: op = Op::add; break;
        case ExprOp::sub: op = Op::sub; break;
        case ExprOp::mul: op = Op::mul; break;
        case ExprOp::div: op = Op::div; break;
        case ExprOp::pow: op = Op::pow_op; break;
        default: throw std::runtime_error("compile: unexpected node");
      }
      prog.push_back({op, 0.0, -1, Builtin::sin});
      return std::max(da, db + 1);
    }
  }
}

}  // namespace

CompiledExpr compile(const Expr& e, const VarAlphabet& alphabet) {
  CompiledExpr ce;
  ce.n_vars = static_cast<int>(alphabet.size());
  ce.stack_need = emit(e, alphabet, ce.prog);
  return ce;
}

double CompiledExpr::eval(const double* vars) const {
  double stack[64] = {};
  std::vector<double> big;
  double* sp = stack;
  if (stack_need > 64) {
    big.resize(static_cast<std::size_t>(stack_need));
    sp = big.data();
  }
  int top = 0;
  for (const Instr& in : prog) {
    switch (in.op) {
      case Op::push_const: sp[top++] = in.cnst; break;
      case Op::push_var: sp[top++] = vars[in.var]; break;
      case Op::add: --top; sp[top - 1] += sp[top]; break;
      case Op::sub: --top; sp[top - 1] -= sp[top]; break;
      case Op::mul: --top; sp[top - 1] *= sp[top]; break;
      case Op::div: --top; sp[top - 1] /= sp[top]; break;
      case Op::pow_op: --top; sp[top - 1] = std::pow(sp[top - 1], sp[top]); break;
      case Op::neg: sp[top - 1] = -sp[top - 1]; break;
      case Op::call_fn:
        switch (in.fn) {
          case Builtin::sin: sp[top - 1] = std::sin(sp[top - 1]); break;
          case Builtin::cos: sp[top - 1] = std::cos(sp[top - 1]); break;
          case Builtin::exp: sp[top - 1] = std::exp(sp[top - 1]); break;
          case Builtin::log: sp[top - 1] = std::log(sp[top - 1]); break;
          case Builtin::sqrt: sp[top - 1] = std::sqrt(sp[top - 1]); break;
          case Builtin::abs: sp[top - 1] = std::abs(sp[top - 1]); break;
        }
        break;
    }
  }
  return sp[0];
}

void eval_grid_serial(const CompiledExpr& ce, const double* vars,
                      std::size_t npoints, double* out) {
  const std::size_t w = static_cast<std::size_t>(ce.n_vars);
  for (std::size_t i = 0; i < npoints; ++i) out[i] = ce.eval(vars + i * w);
}

void eval_grid_parallel(const CompiledExpr& ce, const double* vars,
                        std::size_t npoints, double* out) {
  const std::size_t w = static_cast<std::size_t>(ce.n_vars);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(npoints); ++i)
    out[i] = ce.eval(vars + static_cast<std::size_t>(i) * w);
}

void eval_grid(const CompiledExpr& ce, const double* vars, std::size_t npoints,
               double* out) {
#ifdef _OPENMP
  eval_grid_parallel(ce, vars, npoints, out);
#else
  eval_grid_serial(ce, vars, npoints, out);
#endif
}

}  // namespace ocnoether
