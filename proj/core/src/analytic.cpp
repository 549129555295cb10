#include "spherefield/analytic.hpp"

#include <cmath>

#include "spherefield/errors.hpp"
#include "spherefield/quadrature.hpp"

namespace spherefield {

double integral_bound_constant(double q, double delta) {
  if (!(q < 1.0)) throw DomainError("integral bound: q must be < 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("integral bound: delta must lie in (0, 1)");
  const double w = 1.0 - q;
  return 1.0 / w + 1.0 / (2.0 * w * w * std::abs(std::log(delta)));
}

IntegralBoundCase integral_bound_check(double q, double delta, double a, double abs_tol) {
  IntegralBoundCase c;
  c.q = q;
  c.delta = delta;
  c.a = a;
  c.c_q_delta = integral_bound_constant(q, delta);
  if (!(a > 0.0 && a < delta)) throw DomainError("integral bound: need 0 < a < delta");
  const double w = 1.0 - q;
  // u = exp(-(L + x) / w), L = -w log a: the integral becomes
  // a^w int_0^inf sqrt((L + x) / w) e^{-x} dx / w, smooth and free of underflow.
  const double big_l = -w * std::log(a);
  const double scale = std::pow(a, w);
  auto integrand = [w, big_l](double x) { return std::sqrt((big_l + x) / w) * std::exp(-x) / w; };
  const double tol = scale > 0.0 ? abs_tol / scale : abs_tol;
  auto res = integrate_to_infinity(integrand, 0.0, 1e-13, tol);
  res.value *= scale;
  res.error *= scale;
  c.lhs = res.value;
  c.quad_error = res.error;
  c.rhs = c.c_q_delta * std::pow(a, w) * std::sqrt(-std::log(a));
  c.holds = c.lhs <= c.rhs;
  return c;
}

}  // namespace spherefield
