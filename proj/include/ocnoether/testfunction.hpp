#ifndef OCNOETHER_TESTFUNCTION_HPP
#define OCNOETHER_TESTFUNCTION_HPP

#include <string>

#include "ocnoether/expr.hpp"

namespace ocnoether {

// Scalar weight theta(t) with its time derivative, used to turn pointwise
// statements into integral (weak) ones. Families built by test_basis vanish
// at both interval endpoints.
struct TestFunction {
  Expr theta;      // closed form in t
  Expr theta_dot;  // d theta / dt, closed form in t
  std::string family;
  int k = 0;  // index within the family
};

}  // namespace ocnoether

#endif
