#pragma once

#include <vector>

namespace spherefield {

// Highest degree any evaluation accepts. Legendre values are bounded by 1 on
// [-1, 1], so the plain three-term recurrence is stable up to this cap.
inline constexpr int kMaxDegree = 10000;

// P_0(x) ... P_{ell_max}(x) at a single abscissa.
struct LegendreTable {
  int ell_max = 0;
  double x = 0.0;
  std::vector<double> values;
};

// P_ell(x) by the upward recurrence (l+1)P_{l+1} = (2l+1)xP_l - lP_{l-1}.
// Throws DomainError for ell outside [0, kMaxDegree] or |x| > 1 + 1e-12.
double legendre_eval(int ell, double x);

LegendreTable legendre_batch(int ell_max, double x);

// d^order P_ell / dx^order at x = 1, for order 1 or 2.
double legendre_deriv_at_one(int ell, int order);

// 1 - P_ell(cos theta) for ell = 0..ell_max, without cancellation at small
// theta. Runs the recurrence on D_l = 1 - P_l with h = 1 - cos(theta)
// computed as 2 sin^2(theta/2).
std::vector<double> one_minus_legendre_cos(int ell_max, double theta);

struct TaylorBoundCase {
  int ell = 0;
  double theta = 0.0;
  double lhs = 0.0;    // 1 - P_ell(cos theta)
  double rhs = 0.0;    // ell^2 theta^2 + ell^4 theta^4, constant factored out
  double ratio = 0.0;  // lhs / rhs
};

// Envelope for the Taylor bound check.
inline constexpr double kTaylorThetaMax = 0.5;

// Requires ell >= 1 and 0 < theta <= kTaylorThetaMax.
TaylorBoundCase taylor_bound_check(int ell, double theta);

}  // namespace spherefield
