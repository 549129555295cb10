#pragma once

#include <array>
#include <cmath>

namespace spherefield {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Tolerance on |‖dir‖ - 1| for any direction handed to the library.
inline constexpr double kUnitTolerance = 1e-9;

// Unit direction from colatitude theta and longitude phi.
Vec3 direction_from_angles(double theta, double phi);

// (theta, phi) with theta in [0, pi], phi in [0, 2 pi).
std::array<double, 2> angles_from_direction(const Vec3& dir);

// A point of S^2 x R. The constructor does not normalize; use
// SpacetimePoint::checked to validate.
struct SpacetimePoint {
  Vec3 dir{0.0, 0.0, 1.0};
  double time = 0.0;

  static SpacetimePoint checked(const Vec3& dir, double time);
  static SpacetimePoint from_angles(double theta, double phi, double time);

  friend bool operator==(const SpacetimePoint&, const SpacetimePoint&) = default;
};

// Geodesic distance on S^2, in [0, pi]. Throws DomainError on non-unit input.
double sphere_dist(const Vec3& x, const Vec3& y);

// The point at geodesic distance rho from center along the tangent
// direction cos(azimuth) e1 + sin(azimuth) e2 of a fixed frame at center.
Vec3 geodesic_offset(const Vec3& center, double rho, double azimuth);

}  // namespace spherefield
