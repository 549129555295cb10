#pragma once

#include <cstdint>
#include <vector>

#include "spherefield/point.hpp"
#include "spherefield/spectrum.hpp"

namespace spherefield {

// Eigenvalues below this fraction of the largest are dropped from the
// pseudo-inverse of the conditioning Gram.
inline constexpr double kPseudoInverseCutoff = 1e-10;

// Separation window for the strong local non-determinism check: every
// conditioning direction must sit at angle [theta_min, theta_max] from p0.
struct SlnRegime {
  double theta_min = 0.05;
  double theta_max = 0.3;
};

struct ConditioningReport {
  double var = 0.0;          // Var(T(p0) | T(p_1..p_n))
  double sigma00 = 0.0;      // unconditional variance
  double comparator = 0.0;   // min_k theta_k^(alpha-2)
  double ratio = 0.0;        // var / comparator, NaN when the comparator is 0
  bool degenerate_comparator = false;
  bool in_regime = true;     // set by sln_bound_check
  int n = 0;
  int rank = 0;              // eigenvalues kept in the pseudo-inverse
  double regularization = 0.0;  // absolute eigenvalue cutoff used
};

ConditioningReport conditional_variance(const CovarianceModel& model, const SpacetimePoint& p0,
                                        const std::vector<SpacetimePoint>& cond);

// conditional_variance plus the regime flag. Out-of-regime configurations
// are evaluated and flagged, not rejected.
ConditioningReport sln_bound_check(const CovarianceModel& model, const SpacetimePoint& p0,
                                   const std::vector<SpacetimePoint>& cond,
                                   const SlnRegime& regime = {});

struct SlnSweep {
  std::vector<ConditioningReport> reports;
  double min_ratio = 0.0;  // empirical infimum over non-degenerate reports
  int n_degenerate = 0;
};

// Random configurations: p0 uniform on the sphere at time 0, 1..max_points
// conditioning points at angles uniform in the regime window and lags
// uniform in [-max_lag, max_lag].
SlnSweep sln_sweep(const CovarianceModel& model, int n_configs, int max_points, double max_lag,
                   std::uint64_t seed, const SlnRegime& regime = {});

struct SlnFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> thetas;
  std::vector<double> vars;
  bool in_regime = true;
};

// One conditioning point per rung at angle theta_k and lag t_lag from the
// north pole; OLS slope of log var against log theta.
SlnFit sln_exponent_fit(const CovarianceModel& model, const std::vector<double>& theta_ladder,
                        double t_lag, const SlnRegime& regime = {});

struct PosdefReport {
  double min_eigenvalue = 0.0;
  double scale = 0.0;  // C_l(x,x,t,t)^2 at the reference point
  double trace = 0.0;
  bool passed = false;  // min_eigenvalue >= -1e-8 * scale
};

inline constexpr std::size_t kPosdefMaxPoints = 12;

// M_jk = C(r,r) C(j,k) - C(r,j) C(r,k) for the single-degree kernel
// C(x,y,t,s) = C_l(t-s) (2l+1)/(4pi) P_l(<x,y>) and reference point r.
PosdefReport posdef_check(const SpectrumParams& params, const SpacetimePoint& reference,
                          const std::vector<SpacetimePoint>& points, int ell);

}  // namespace spherefield
