#include "spherefield/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>
#include <cmath>
#include <sstream>

#include "spherefield/errors.hpp"

namespace spherefield {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol) {
  constexpr unsigned kMaxDepth = 30;
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, kMaxDepth, rel_tol, &error);
  if (!std::isfinite(value) || error > std::max(abs_tol, rel_tol * std::abs(value))) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << a << ", " << b << "]: value " << value
        << ", error estimate " << error;
    throw NumericalError(msg.str());
  }
  return {value, error};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double rel_tol, double abs_tol) {
  boost::math::quadrature::exp_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(abs_tol, rel_tol * std::abs(value))) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << a << ", inf): value " << value
        << ", error estimate " << error;
    throw NumericalError(msg.str());
  }
  return {value, error};
}

}  // namespace spherefield
