#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spherefield/point.hpp"

namespace spherefield {

// Multiplier G(l) in C_l(0) = G(l) l^{-alpha}. Either identically one or
// tabulated for l = 1..n; degrees past the table reuse the last entry.
class GProfile {
 public:
  GProfile() = default;
  static GProfile constant_one() { return {}; }
  static GProfile tabulated(std::vector<double> values_from_one);

  double operator()(int ell) const;
  bool is_constant() const { return table_.empty(); }
  const std::vector<double>& table() const { return table_; }
  // "const:1" or "table:<n>" for manifests and sidecars.
  std::string describe() const;

 private:
  std::vector<double> table_;
};

// The angular power spectrum and its temporal modulation:
//   C_l(tau) = C_l(0) (1 - |tau|^beta) for |tau| < 1,
//   C_l(0) = G(l) l^{-alpha} (l >= 1),  C_0(0) = c1,
// with 0 < beta < 2, 2 + beta <= alpha < 4, c0^{-1} <= G <= c0, c1 > 0. The
// closed end alpha = 2 + beta is accepted so that alpha = 3, beta = 1 runs.
struct SpectrumParams {
  double alpha = 3.0;
  double beta = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
  GProfile g_profile;

  // Every violated constraint, as a human-readable line. Empty iff valid.
  std::vector<std::string> violations() const;
  // Throws DomainError listing the violations.
  void validate() const;

  static SpectrumParams make(double alpha, double beta, double c0 = 1.0, double c1 = 1.0,
                             GProfile g = {});
};

double cl_zero(const SpectrumParams& params, int ell);

// Throws DomainError for |tau| >= 1: the model leaves that regime undefined.
double cl_tau(const SpectrumParams& params, int ell, double tau);

// 1 - |tau|^beta, the common temporal factor of every C_l.
double time_factor(const SpectrumParams& params, double tau);

// Certified upper bound on sum_{l > ell_max} (2l+1)/(4 pi) C_l(0), by
// comparison with c0 * int_L^inf (2u+1) u^{-alpha} du/(4 pi).
double tail_bound(const SpectrumParams& params, int ell_max);

// Truncated covariance series. Immutable after construction.
class CovarianceModel {
 public:
  CovarianceModel(SpectrumParams params, int ell_max);

  const SpectrumParams& params() const { return params_; }
  int ell_max() const { return ell_max_; }
  double tail_bound() const { return tail_bound_; }

  // (2l+1)/(4 pi) C_l(0) for l = 0..ell_max.
  const std::vector<double>& weights() const { return weights_; }

  // Gamma(1, 0): pointwise variance of the truncated field.
  double variance() const { return variance_; }

  // sum_{l>=1} (2l+1)/(2 pi) C_l(0).
  double increment_scale() const { return increment_scale_; }

  // sum_l w_l P_l(eta) (no temporal factor).
  double spatial_cov(double cos_angle) const;

 private:
  SpectrumParams params_;
  int ell_max_;
  double tail_bound_;
  std::vector<double> weights_;
  double variance_;
  double increment_scale_;
};

// Gamma(eta, tau) = sum_{l<=L} (2l+1)/(4 pi) C_l(tau) P_l(eta).
double gamma_cov(const CovarianceModel& model, double cos_angle, double tau);

// Covariance between two field values.
double point_cov(const CovarianceModel& model, const SpacetimePoint& p, const SpacetimePoint& q);

// d_T^2 restricted to l >= 1:
//   |tau|^beta S0 + (1 - |tau|^beta) sum_{l>=1} (2l+1)/(2 pi) C_l(0)(1 - P_l(cos theta)).
double canonical_dist_sq(const CovarianceModel& model, const SpacetimePoint& p,
                         const SpacetimePoint& q);

// mu^2 = |tau|^beta + (1 - |tau|^beta) theta^{alpha-2}.
double mu_dist_sq(const SpectrumParams& params, const SpacetimePoint& p, const SpacetimePoint& q);

// rho_alpha(t) = t^{(alpha-2)/2}.
double rho_alpha(const SpectrumParams& params, double t);

// Smallest ell_max >= 1 with tail_bound <= tol (doubling then bisection).
// Throws ResourceError if even kMaxDegree is not enough.
CovarianceModel select_truncation(const SpectrumParams& params, double tol);

struct RatioEnvelope {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int n_pairs = 0;
};

// d_T^2 / mu^2 over random pairs with geodesic separation <= max_theta and
// lag <= max_tau. Coincident pairs are redrawn.
RatioEnvelope equivalence_ratio_scan(const CovarianceModel& model, int n_pairs, double max_theta,
                                     double max_tau, std::uint64_t seed);

}  // namespace spherefield
