#include "spherefield/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spherefield/errors.hpp"

namespace spherefield {
namespace {

constexpr double kAbscissaTolerance = 1e-12;

void check_degree(int ell) {
  if (ell < 0 || ell > kMaxDegree) {
    throw DomainError("legendre: degree " + std::to_string(ell) + " outside [0, " +
                      std::to_string(kMaxDegree) + "]");
  }
}

double checked_abscissa(double x) {
  if (!(std::abs(x) <= 1.0 + kAbscissaTolerance)) {
    throw DomainError("legendre: abscissa " + std::to_string(x) + " outside [-1, 1]");
  }
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

double legendre_eval(int ell, double x) {
  check_degree(ell);
  x = checked_abscissa(x);
  if (ell == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int l = 1; l < ell; ++l) {
    const double next = ((2.0 * l + 1.0) * x * cur - l * prev) / (l + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

LegendreTable legendre_batch(int ell_max, double x) {
  check_degree(ell_max);
  x = checked_abscissa(x);
  LegendreTable table;
  table.ell_max = ell_max;
  table.x = x;
  table.values.resize(static_cast<std::size_t>(ell_max) + 1);
  table.values[0] = 1.0;
  if (ell_max >= 1) table.values[1] = x;
  for (int l = 1; l < ell_max; ++l) {
    table.values[l + 1] =
        ((2.0 * l + 1.0) * x * table.values[l] - l * table.values[l - 1]) / (l + 1.0);
  }
  return table;
}

double legendre_deriv_at_one(int ell, int order) {
  check_degree(ell);
  const double l = ell;
  switch (order) {
    case 1:
      if (ell < 1) break;
      return l * (l + 1.0) / 2.0;
    case 2:
      if (ell < 2) break;
      // (l+2)! / (8 (l-2)!) without forming factorials.
      return (l + 2.0) * (l + 1.0) * l * (l - 1.0) / 8.0;
    default:
      throw DomainError("legendre_deriv_at_one: order must be 1 or 2");
  }
  throw DomainError("legendre_deriv_at_one: degree " + std::to_string(ell) +
                    " below derivative order " + std::to_string(order));
}

std::vector<double> one_minus_legendre_cos(int ell_max, double theta) {
  check_degree(ell_max);
  const double s = std::sin(0.5 * theta);
  const double h = 2.0 * s * s;
  std::vector<double> d(static_cast<std::size_t>(ell_max) + 1, 0.0);
  if (ell_max >= 1) d[1] = h;
  for (int l = 1; l < ell_max; ++l) {
    // (l+1) D_{l+1} = (2l+1) h + (2l+1)(1-h) D_l - l D_{l-1}
    d[l + 1] = ((2.0 * l + 1.0) * (h + (1.0 - h) * d[l]) - l * d[l - 1]) / (l + 1.0);
  }
  return d;
}

TaylorBoundCase taylor_bound_check(int ell, double theta) {
  if (ell < 1) throw DomainError("taylor_bound_check: degree must be >= 1");
  if (!(theta > 0.0 && theta <= kTaylorThetaMax)) {
    throw DomainError("taylor_bound_check: theta must lie in (0, 0.5]");
  }
  TaylorBoundCase c;
  c.ell = ell;
  c.theta = theta;
  c.lhs = one_minus_legendre_cos(ell, theta)[ell];
  const double lt = ell * theta;
  c.rhs = lt * lt + lt * lt * lt * lt;
  c.ratio = c.lhs / c.rhs;
  return c;
}

}  // namespace spherefield
