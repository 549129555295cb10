#pragma once

#include <cstdint>
#include <vector>

#include "spherefield/point.hpp"
#include "spherefield/spectrum.hpp"

namespace spherefield {

struct SmallBallCurve {
  SpacetimePoint center;
  double r = 0.0;
  std::vector<double> eps_grid;  // strictly decreasing
  std::vector<double> p_hat;
  std::vector<std::int64_t> counts;
  std::vector<double> ci_lo;     // Wilson 95%
  std::vector<double> ci_hi;
  std::vector<double> ci_half_width;
  std::int64_t n_samples = 0;
  int n_space = 0;
  int n_time = 0;
  std::size_t mesh_points = 0;
  int ell_max = 0;
  std::uint64_t seed = 0;
  double clipped_mass = 0.0;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Two-sided Wilson score interval for k successes in n trials.
WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

// Mesh maxima M = max_i |T(y_i) - T(center)| over ball_mesh(center, r, n_space, n_time),
// one per draw, sampled jointly with the center by the direct backend.
std::vector<double> ball_maxima(const CovarianceModel& model, const SpacetimePoint& center,
                                double r, int n_space, int n_time, std::int64_t n_samples,
                                std::uint64_t seed, double* clipped_mass = nullptr);

// Empirical CDF of the maxima at each eps (one sample set for the whole grid).
// Only the counts are filled in; callers set r and the mesh fields.
SmallBallCurve curve_from_maxima(const std::vector<double>& maxima,
                                 const std::vector<double>& eps_grid);

SmallBallCurve estimate_small_ball(const CovarianceModel& model, const SpacetimePoint& center,
                                   double r, const std::vector<double>& eps_grid,
                                   std::int64_t n_samples, int n_space, int n_time,
                                   std::uint64_t seed);

// Usable points of a curve: p_lo <= p_hat <= p_hi and at least min_count hits.
struct FitWindow {
  double p_lo = 1e-3;
  double p_hi = 0.5;
  std::int64_t min_count = 10;
};

std::vector<std::size_t> usable_points(const SmallBallCurve& curve, const FitWindow& window = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double implied_p = 0.0;
  double theory_p = 0.0;
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  int n_points = 0;
};

// Weighted least squares of log(-log p_hat) on log eps, with weights from
// the delta-method variance (1-p) / (n p log(p)^2).
ExponentFit fit_exponent(const SmallBallCurve& curve, const SpectrumParams& params,
                         const FitWindow& window = {});

struct BoundsEstimate {
  double a1_hat = 0.0;  // min over the window of -log p_hat / psi(r, eps)
  double a2_hat = 0.0;  // max of the same
  bool consistent = false;  // 0 < a1_hat <= a2_hat
};

BoundsEstimate bounds_consistency(const SmallBallCurve& curve, const SpectrumParams& params,
                                  const FitWindow& window = {});

struct KappaPoint {
  double eps = 0.0;
  double value = 0.0;  // eps^{1/p} (-log p_hat) / r^3
  double lo = 0.0;     // from the Wilson interval of p_hat
  double hi = 0.0;
};

std::vector<KappaPoint> kappa_estimate(const SmallBallCurve& curve, const SpectrumParams& params,
                                       const FitWindow& window = {});

struct KappaOverlap {
  int n_shared = 0;
  double worst_gap = 0.0;  // max |k_a - k_b| / (half_a + half_b) over shared eps
  bool overlap = false;    // n_shared > 0 and worst_gap <= 2
};

// Compares two kappa sequences on the eps values both contain.
KappaOverlap kappa_overlap(const std::vector<KappaPoint>& a, const std::vector<KappaPoint>& b);

// Geometric eps ladder from eps_hi down to eps_lo with n points.
std::vector<double> eps_ladder(double eps_hi, double eps_lo, int n);

}  // namespace spherefield
