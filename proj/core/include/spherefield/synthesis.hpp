#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spherefield/linalg.hpp"
#include "spherefield/point.hpp"
#include "spherefield/spectrum.hpp"

namespace spherefield {

// Strictly increasing times spanning a window shorter than 1.
struct TimeGrid {
  std::vector<double> points;

  static TimeGrid make(std::vector<double> points);
  double window_length() const { return points.back() - points.front(); }
  std::size_t size() const { return points.size(); }
};

// K_ij = 1 - |t_i - t_j|^beta: the temporal factor every degree shares.
Eigen::MatrixXd temporal_gram(const SpectrumParams& params, const TimeGrid& grid);

struct CoefficientPaths {
  int ell = 0;
  Eigen::MatrixXd paths;  // (2l+1) x n_times, row m + l
  double clipped_mass = 0.0;
};

// The 2l+1 coefficient processes a_lm(t) of one realization on the grid.
// Each (l, m, draw) reads its own RNG substream.
CoefficientPaths sample_alm_paths(const SpectrumParams& params, int ell, const TimeGrid& grid,
                                  std::uint64_t seed, std::uint64_t draw = 0);

enum class Backend { kKl, kDirect };
std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct FieldRealization {
  std::vector<SpacetimePoint> mesh;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
  int ell_max = 0;
  Backend backend = Backend::kKl;
  double clipped_mass = 0.0;
};

// Space mesh x time grid, time-major: index = k * dirs.size() + i.
std::vector<SpacetimePoint> lattice(const std::vector<Vec3>& dirs, const TimeGrid& grid);

// Truncated Karhunen-Loeve synthesis on an arbitrary point set.
//
// Per-degree band fields are rounded to a fixed 2^-36 grid and summed in
// integer arithmetic, so any split of the degree range adds back to the
// full field bit for bit and the result cannot depend on summation order.
class KlSynthesizer {
 public:
  KlSynthesizer(const CovarianceModel& model, std::vector<SpacetimePoint> points);

  std::vector<double> sample(std::uint64_t seed, std::uint64_t draw) const;

  struct Bands {
    std::vector<double> low;   // l <= d_split
    std::vector<double> high;  // l > d_split
    std::vector<double> full;
  };
  Bands sample_bands(std::uint64_t seed, std::uint64_t draw, int d_split) const;

  const std::vector<SpacetimePoint>& points() const { return points_; }
  const TimeGrid& grid() const { return grid_; }
  double clipped_mass() const { return clipped_mass_; }
  int ell_max() const { return ell_max_; }

 private:
  void accumulate(std::uint64_t seed, std::uint64_t draw, int ell_lo, int ell_hi,
                  std::vector<std::int64_t>& acc) const;

  std::vector<SpacetimePoint> points_;
  int ell_max_;
  std::vector<double> cl0_;
  TimeGrid grid_;
  std::vector<int> time_index_;
  Eigen::MatrixXd time_root_;
  bool time_root_lower_ = true;
  double clipped_mass_ = 0.0;
  Eigen::MatrixXd harmonics_;  // n_points x (ell_max+1)^2
};

FieldRealization synthesize_field(const CovarianceModel& model, const std::vector<Vec3>& dirs,
                                  const TimeGrid& grid, std::uint64_t seed,
                                  std::uint64_t draw = 0);

// Dense joint sampling from the truncated covariance [Gamma(<x_i,x_j>, t_i - t_j)].
inline constexpr std::size_t kDirectSamplerBudget = 4000;

Eigen::MatrixXd gram_matrix(const CovarianceModel& model, const std::vector<SpacetimePoint>& points);

class GaussianSampler {
 public:
  GaussianSampler(const CovarianceModel& model, std::vector<SpacetimePoint> points);

  // Draw number `draw` of this seed; each draw owns an RNG substream.
  void draw(std::uint64_t seed, std::uint64_t draw, std::span<double> out) const;
  // Draws first..first+n-1 as columns (n_points x n).
  Eigen::MatrixXd draws(std::uint64_t seed, std::uint64_t first, std::size_t n) const;

  const std::vector<SpacetimePoint>& points() const { return points_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  double clipped_mass() const { return factor_.clipped_mass; }

 private:
  std::vector<SpacetimePoint> points_;
  Eigen::MatrixXd gram_;
  PsdFactor factor_;
};

// n_draws x n_points matrix of joint draws (row = draw).
Eigen::MatrixXd direct_gaussian_sample(const CovarianceModel& model,
                                       const std::vector<SpacetimePoint>& points,
                                       std::uint64_t seed, std::size_t n_draws);

struct CovCheck {
  double max_abs_error = 0.0;
  double max_se_units = 0.0;
  std::size_t n_samples = 0;
};

// Empirical second moments of zero-mean draws against the analytic Gram.
// Entry (i,j) has standard error sqrt((S_ii S_jj + S_ij^2) / n).
CovCheck empirical_cov_check(const CovarianceModel& model,
                             const std::vector<SpacetimePoint>& points, std::size_t n_samples,
                             std::uint64_t seed, Backend backend);

// Compares accumulated moments E[x x^T] against a reference Gram.
CovCheck compare_moments(const Eigen::MatrixXd& moments, const Eigen::MatrixXd& reference,
                         std::size_t n_samples);

}  // namespace spherefield
