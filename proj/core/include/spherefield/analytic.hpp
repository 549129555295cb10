#pragma once

namespace spherefield {

// int_0^a u^{-q} sqrt(-log u) du against c_{q,delta} a^{1-q} sqrt(-log a),
// c_{q,delta} = 1/(1-q) + 1/(2 (1-q)^2 |log delta|).
struct IntegralBoundCase {
  double q = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double c_q_delta = 0.0;
  double quad_error = 0.0;
  bool holds = false;  // lhs <= rhs
};

double integral_bound_constant(double q, double delta);

// Requires q < 1 and 0 < a < delta < 1. The quadrature runs in
// s = -(1-q) log u on a half line, so tiny a (1e-200) costs nothing extra;
// abs_tol is the absolute target on lhs.
IntegralBoundCase integral_bound_check(double q, double delta, double a, double abs_tol = 1e-10);

}  // namespace spherefield
