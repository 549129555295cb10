#pragma once

#include <cstdint>
#include <vector>

#include "spherefield/point.hpp"
#include "spherefield/spectrum.hpp"
#include "spherefield/synthesis.hpp"

namespace spherefield {

// p = (2/beta + 4/(alpha-2))^{-1}.
struct RateParams {
  double p = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  static RateParams from(double alpha, double beta);
  static RateParams from(const SpectrumParams& params) { return from(params.alpha, params.beta); }
};

double p_exponent(double alpha, double beta);

// phi(r) = (log|log r| / r^3)^p, for 0 < r < 1/e.
double phi_rate(const RateParams& rp, double r);

// psi(r, eps) = r^3 eps^{-1/p}.
double psi_rate(const RateParams& rp, double r, double eps);

struct LiminfTrace {
  std::vector<double> radii;        // r_n = R^{-(n + offset)}, n = 1..n_levels
  std::vector<double> m_hat;        // mesh maximum of |T - T(center)| on B_{r_n}
  std::vector<double> phi;
  std::vector<double> values;       // phi(r_n) * m_hat
  std::vector<double> running_min;
  std::uint64_t seed = 0;
  double base = 0.0;
  int offset = 0;
  bool has_zero = false;
};

inline constexpr double kLiminfRadiusFloor = 1e-3;
inline constexpr double kLiminfFirstRadius = 0.3;

// Smallest offset >= 0 with R^{-(1 + offset)} <= 0.3.
int ladder_offset(double base);

// Union of nested ball meshes for the ladder; point 0 is the center and
// level_of[i] is the deepest level whose ball mesh contributed point i.
struct LadderMesh {
  std::vector<SpacetimePoint> points;
  std::vector<int> level_of;
  std::vector<double> radii;
  int offset = 0;
};

LadderMesh ladder_mesh(const SpacetimePoint& center, double base, int n_levels, int n_space,
                       int n_time);

// Traces read one realization per seed on the shared ladder mesh.
std::vector<LiminfTrace> empirical_liminf(const CovarianceModel& model,
                                          const SpacetimePoint& center, double base,
                                          int n_levels, int n_space, int n_time,
                                          const std::vector<std::uint64_t>& seeds);

// Low (l <= d_split) and high (l > d_split) bands of the same KL draw.
KlSynthesizer::Bands band_decomposition(const CovarianceModel& model, int d_split,
                                        const std::vector<SpacetimePoint>& points,
                                        std::uint64_t seed, std::uint64_t draw = 0);

// sum_{l > d_split} (2l+1)/(4pi) C_l(0) within the model's truncation.
double high_band_variance(const CovarianceModel& model, int d_split);

struct BandCheck {
  double max_cross_se_units = 0.0;  // worst cross-band covariance entry, in SE
  CovCheck high_band;               // high-band moments vs the band-limited Gram
  bool exact_reconstruction = true;
  std::size_t n_draws = 0;
};

BandCheck band_independence_check(const CovarianceModel& model, int d_split,
                                  const std::vector<SpacetimePoint>& points,
                                  std::size_t n_draws, std::uint64_t seed);

}  // namespace spherefield
