#pragma once

#include <functional>

namespace spherefield {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws NumericalError unless the
// error estimate meets max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, double abs_tol = 1e-14);

// exp-sinh quadrature on [a, inf). Same convergence contract.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double rel_tol = 1e-12, double abs_tol = 1e-14);

}  // namespace spherefield
