#include "spherefield/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spherefield/errors.hpp"
#include "spherefield/legendre.hpp"

namespace spherefield {
namespace {

void check_direction(const Vec3& dir) {
  if (!(std::abs(norm(dir) - 1.0) <= kUnitTolerance)) {
    throw DomainError("spherical harmonic: direction is not a unit vector");
  }
}

void check_degree(int ell_max) {
  if (ell_max < 0 || ell_max > kMaxDegree) {
    throw DomainError("spherical harmonic: degree " + std::to_string(ell_max) + " out of range");
  }
}

// Fully normalized associated Legendre values Pbar_lm for one fixed m,
// l = m..ell_max, by the standard upward recurrence in l.
void column(int ell_max, int m, double x, double pmm, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(ell_max) + 1, 0.0);
  out[m] = pmm;
  if (m == ell_max) return;
  out[m + 1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
  for (int l = m + 2; l <= ell_max; ++l) {
    const double l2 = static_cast<double>(l) * l;
    const double m2 = static_cast<double>(m) * m;
    const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    out[l] = a * (x * out[l - 1] - b * out[l - 2]);
  }
}

}  // namespace

std::vector<double> real_sph_harm_all(int ell_max, const Vec3& dir) {
  check_degree(ell_max);
  check_direction(dir);
  const double nrm = norm(dir);
  const double x = dir[2] / nrm;
  const double s = std::hypot(dir[0], dir[1]) / nrm;
  // cos(phi), sin(phi); phi = 0 at the poles
  const double c1 = s > 0.0 ? dir[0] / (s * nrm) : 1.0;
  const double s1 = s > 0.0 ? dir[1] / (s * nrm) : 0.0;

  std::vector<double> y(static_cast<std::size_t>(harmonic_count(ell_max)), 0.0);
  std::vector<double> col;
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  double cm = 1.0;
  double sm = 0.0;
  for (int m = 0; m <= ell_max; ++m) {
    if (m > 0) {
      pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      const double cn = cm * c1 - sm * s1;
      sm = sm * c1 + cm * s1;
      cm = cn;
    }
    column(ell_max, m, x, pmm, col);
    for (int l = m; l <= ell_max; ++l) {
      if (m == 0) {
        y[harmonic_index(l, 0)] = col[l];
      } else {
        y[harmonic_index(l, m)] = std::numbers::sqrt2 * col[l] * cm;
        y[harmonic_index(l, -m)] = std::numbers::sqrt2 * col[l] * sm;
      }
    }
  }
  return y;
}

double real_sph_harm(int ell, int m, const Vec3& dir) {
  check_degree(ell);
  if (m < -ell || m > ell) throw DomainError("real_sph_harm: |m| > ell");
  check_direction(dir);
  const double nrm = norm(dir);
  const double x = dir[2] / nrm;
  const double s = std::hypot(dir[0], dir[1]) / nrm;
  const int am = std::abs(m);
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 1; k <= am; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  std::vector<double> col;
  column(ell, am, x, pmm, col);
  if (m == 0) return col[ell];
  const double phi = s > 0.0 ? std::atan2(dir[1], dir[0]) : 0.0;
  const double trig = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
  return std::numbers::sqrt2 * col[ell] * trig;
}

}  // namespace spherefield
