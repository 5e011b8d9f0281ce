#ifndef OCNOETHER_QUADRATURE_HPP
#define OCNOETHER_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocnoether {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod 7/15 with a fixed composite-Simpson fallback, and an
// optional graded mesh t_j = a + (b-a)*(j/N)^gamma clustered toward a singular
// endpoint (nodes stay interior, so endpoint power singularities like t^(-1/3)
// integrate to tight tolerances).
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;

  bool use_simpson = false;  // fixed composite Simpson instead of adaptive GK

  bool graded = false;
  double grading_exponent = 3.0;  // gamma >= 1
  bool graded_left = true;        // cluster toward a (else toward b)
  int layers = 512;               // graded cells / Simpson panels
};

struct IntegrateResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

// Integrates f over [a,b]. Throws QuadratureError on a non-finite sample,
// naming the sample location. A result with converged == false is the explicit
// accuracy-not-reached signal; the value is still the best estimate.
IntegrateResult integrate(const std::function<double(double)>& f, double a,
                          double b, const QuadratureSpec& spec = {});

// Composite Simpson over tabulated samples on a uniform grid (odd count).
// Used for integrals along sampled trajectories.
double simpson_tabulated(const std::vector<double>& t, const std::vector<double>& v);

// Trapezoid over an arbitrary strictly increasing grid (fallback for
// non-uniform sample grids).
double trapezoid_tabulated(const std::vector<double>& t, const std::vector<double>& v);

}  // namespace ocnoether

#endif
