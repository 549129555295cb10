#pragma once

#include <vector>

#include "spherefield/point.hpp"

namespace spherefield {

// Real orthonormal spherical harmonics, no Condon-Shortley phase:
//   Y_l0 = Pbar_l0(cos theta),
//   Y_lm = sqrt(2) Pbar_lm(cos theta) cos(m phi),  m > 0,
//   Y_l,-m = sqrt(2) Pbar_lm(cos theta) sin(m phi),
// with Pbar normalized to make sum_m Y_lm(x) Y_lm(y) = (2l+1)/(4 pi) P_l(<x,y>).
double real_sph_harm(int ell, int m, const Vec3& dir);

// Index of Y_lm inside the flat arrays below.
constexpr int harmonic_index(int ell, int m) { return ell * ell + ell + m; }
constexpr int harmonic_count(int ell_max) { return (ell_max + 1) * (ell_max + 1); }

// All Y_lm(dir) for l <= ell_max, laid out by harmonic_index.
std::vector<double> real_sph_harm_all(int ell_max, const Vec3& dir);

}  // namespace spherefield
