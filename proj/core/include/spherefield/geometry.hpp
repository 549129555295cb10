#pragma once

#include <cstdint>
#include <vector>

#include "spherefield/point.hpp"
#include "spherefield/spectrum.hpp"

namespace spherefield {

// d_q((x,t),(y,s)) = (|t-s|^q + d(x,y)^q)^{1/q}; q = +inf gives the max.
// The library fixes q = 2 everywhere else.
double product_dist(const SpacetimePoint& p, const SpacetimePoint& q, double q_exponent = 2.0);

// Discretization of the product ball B_r(center) = {d_2 < r}.
//
// Time nodes are cell centers of n_time equal cells of (t - r, t + r) (just
// t when n_time == 1). At lag s the slice is a spherical cap of radius
// sqrt(r^2 - s^2); it carries rings k = 0..n_space-1 at radius k/n_space of
// the cap radius, ring k holding 2k+1 equally spaced points, so each slice
// has n_space^2 points. The center is always point 0.
struct BallMesh {
  SpacetimePoint center;
  double radius = 0.0;
  int n_space = 1;
  int n_time = 1;
  std::vector<SpacetimePoint> points;
};

// Requires 0 < r <= 0.5 (all lags inside the ball stay below 1).
BallMesh ball_mesh(const SpacetimePoint& center, double r, int n_space, int n_time);

// Uniform sample (product of surface and Lebesgue measure) from B_r(center).
std::vector<SpacetimePoint> sample_ball(const SpacetimePoint& center, double r, int n,
                                        std::uint64_t seed);

// max over probe points of the distance to the nearest mesh point (d_2).
double fill_distance(const BallMesh& mesh, int n_probe, std::uint64_t seed);

enum class NetMetric { kMu, kCanonical };

struct CoveringEstimate {
  int net_size = 0;
  int n_probe = 0;
  double eps = 0.0;
};

inline constexpr int kDefaultCoveringProbes = 100000;

// Greedy farthest-point eps-net over a dense probe sample of B_r(center).
// An upper-bound estimator of the covering number N(B_r, metric, eps).
// The canonical metric needs a model; the mu gauge only uses its params.
CoveringEstimate covering_number(const CovarianceModel& model, const SpacetimePoint& center,
                                 double r, double eps, NetMetric metric, std::uint64_t seed,
                                 int n_probe = kDefaultCoveringProbes);

struct VolumeEstimate {
  double volume = 0.0;
  double std_err = 0.0;
  int n_samples = 0;
};

// Monte Carlo product-measure volume of {mu((N,0),(y,s)) < eps}, sampled in
// the enclosing box theta <= min(eps^{2/(alpha-2)}, 1), |s| <= min(eps^{2/beta}, 1).
// The branch theta > 1 is excluded.
VolumeEstimate mu_ball_volume_mc(const SpectrumParams& params, double eps, int n_samples,
                                 std::uint64_t seed);

// F(eps) in Vol(mu-ball) = eps^{1/p} F(eps), by adaptive quadrature of
// 4 pi int_0^1 u ((1-u^{a-2})/(1-eps^2 u^{a-2}))^{1/beta} sinc(eps^{2/(a-2)} u) du.
// eps = 0 returns the limit 4 pi int_0^1 u (1-u^{a-2})^{1/beta} du.
double volume_prefactor(const SpectrumParams& params, double eps);

// 1/p = 2/beta + 4/(alpha-2).
double volume_exponent(const SpectrumParams& params);

// Vol(B_r) = 4 pi int_0^r sin(theta) sqrt(r^2 - theta^2) d theta.
double product_ball_volume(double r);

VolumeEstimate product_ball_volume_mc(double r, int n_samples, std::uint64_t seed);

}  // namespace spherefield
