#include "spherefield/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spherefield/errors.hpp"
#include "spherefield/harmonics.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/parallel.hpp"
#include "spherefield/rng.hpp"

namespace spherefield {
namespace {

constexpr double kFixedScale = 68719476736.0;  // 2^36
constexpr double kFixedLimit = 65536.0;        // keeps every partial sum exact in a double

std::uint32_t coefficient_stream(int ell, int m) {
  return static_cast<std::uint32_t>(ell) * static_cast<std::uint32_t>(2 * kMaxDegree + 1) +
         static_cast<std::uint32_t>(m + ell);
}

std::uint32_t checked_draw(std::uint64_t draw) {
  if (draw > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("KL draw index exceeds 2^32");
  }
  return static_cast<std::uint32_t>(draw);
}

std::int64_t to_fixed(double v) {
  if (!(std::abs(v) < kFixedLimit)) {
    std::ostringstream msg;
    msg << "KL band value " << v << " outside the fixed-point range";
    throw NumericalError(msg.str());
  }
  return std::llround(v * kFixedScale);
}

std::vector<double> from_fixed(const std::vector<std::int64_t>& acc) {
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out[i] = static_cast<double>(acc[i]) / kFixedScale;
    if (!(std::abs(out[i]) < kFixedLimit)) throw NumericalError("KL field value out of range");
  }
  return out;
}

void check_points(const std::vector<SpacetimePoint>& points) {
  if (points.empty()) throw DomainError("point set is empty");
  for (const auto& p : points) {
    if (!(std::abs(norm(p.dir) - 1.0) <= kUnitTolerance) || !std::isfinite(p.time)) {
      throw DomainError("point set holds a non-unit direction or non-finite time");
    }
  }
}

}  // namespace

TimeGrid TimeGrid::make(std::vector<double> points) {
  if (points.empty()) throw DomainError("TimeGrid: needs at least one time");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw DomainError("TimeGrid: non-finite time");
    if (i > 0 && !(points[i] > points[i - 1])) throw DomainError("TimeGrid: times must increase strictly");
  }
  if (!(points.back() - points.front() < 1.0)) throw DomainError("TimeGrid: window >= 1");
  return TimeGrid{std::move(points)};
}

Eigen::MatrixXd temporal_gram(const SpectrumParams& params, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = time_factor(params, grid.points[i] - grid.points[j]);
    }
  }
  return k;
}

CoefficientPaths sample_alm_paths(const SpectrumParams& params, int ell, const TimeGrid& grid,
                                  std::uint64_t seed, std::uint64_t draw) {
  params.validate();
  if (ell < 0 || ell > kMaxDegree) throw DomainError("sample_alm_paths: degree out of range");
  const PsdFactor f = factorize_psd(temporal_gram(params, grid));
  const double scale = std::sqrt(cl_zero(params, ell));
  const auto nt = static_cast<Eigen::Index>(grid.size());
  CoefficientPaths out;
  out.ell = ell;
  out.paths.resize(2 * ell + 1, nt);
  out.clipped_mass = (2.0 * ell + 1.0) * cl_zero(params, ell) * f.clipped_mass;
  Eigen::VectorXd z(nt);
  for (int m = -ell; m <= ell; ++m) {
    StreamRng rng(seed, StreamDomain::kKlCoefficients, checked_draw(draw), coefficient_stream(ell, m));
    for (Eigen::Index k = 0; k < nt; ++k) z(k) = rng.normal();
    out.paths.row(m + ell) = (scale * (f.root * z)).transpose();
  }
  return out;
}

std::string to_string(Backend b) { return b == Backend::kKl ? "kl" : "direct"; }

Backend backend_from_string(const std::string& s) {
  if (s == "kl") return Backend::kKl;
  if (s == "direct") return Backend::kDirect;
  throw DomainError("unknown backend '" + s + "' (expected kl or direct)");
}

std::vector<SpacetimePoint> lattice(const std::vector<Vec3>& dirs, const TimeGrid& grid) {
  std::vector<SpacetimePoint> out;
  out.reserve(dirs.size() * grid.size());
  for (double t : grid.points) {
    for (const auto& d : dirs) out.push_back({d, t});
  }
  return out;
}

KlSynthesizer::KlSynthesizer(const CovarianceModel& model, std::vector<SpacetimePoint> points)
    : points_(std::move(points)), ell_max_(model.ell_max()) {
  check_points(points_);
  std::vector<double> times;
  times.reserve(points_.size());
  for (const auto& p : points_) times.push_back(p.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  grid_ = TimeGrid::make(std::move(times));
  time_index_.reserve(points_.size());
  for (const auto& p : points_) {
    const auto it = std::lower_bound(grid_.points.begin(), grid_.points.end(), p.time);
    time_index_.push_back(static_cast<int>(it - grid_.points.begin()));
  }

  const PsdFactor f = factorize_psd(temporal_gram(model.params(), grid_));
  time_root_ = f.root;
  time_root_lower_ = !f.eigen_fallback;

  cl0_.resize(static_cast<std::size_t>(ell_max_) + 1);
  for (int l = 0; l <= ell_max_; ++l) {
    cl0_[l] = cl_zero(model.params(), l);
    clipped_mass_ += (2.0 * l + 1.0) * cl0_[l] * f.clipped_mass;
  }

  harmonics_.resize(static_cast<Eigen::Index>(points_.size()), harmonic_count(ell_max_));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto y = real_sph_harm_all(ell_max_, points_[i].dir);
    harmonics_.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  }
}

void KlSynthesizer::accumulate(std::uint64_t seed, std::uint64_t draw, int ell_lo, int ell_hi,
                               std::vector<std::int64_t>& acc) const {
  const std::uint32_t d = checked_draw(draw);
  const auto nt = static_cast<Eigen::Index>(grid_.size());
  const std::size_t np = points_.size();
  Eigen::VectorXd z(nt);
  Eigen::VectorXd path(nt);
  std::vector<double> band(np);
  for (int l = ell_lo; l <= ell_hi; ++l) {
    std::fill(band.begin(), band.end(), 0.0);
    const double scale = std::sqrt(cl0_[l]);
    for (int m = -l; m <= l; ++m) {
      StreamRng rng(seed, StreamDomain::kKlCoefficients, d, coefficient_stream(l, m));
      for (Eigen::Index k = 0; k < nt; ++k) z(k) = rng.normal();
      if (time_root_lower_) path.noalias() = time_root_.triangularView<Eigen::Lower>() * z;
      else path.noalias() = time_root_ * z;
      path *= scale;
      const Eigen::Index col = harmonic_index(l, m);
      for (std::size_t i = 0; i < np; ++i) {
        band[i] += path(time_index_[i]) * harmonics_(static_cast<Eigen::Index>(i), col);
      }
    }
    for (std::size_t i = 0; i < np; ++i) acc[i] += to_fixed(band[i]);
  }
}

std::vector<double> KlSynthesizer::sample(std::uint64_t seed, std::uint64_t draw) const {
  std::vector<std::int64_t> acc(points_.size(), 0);
  accumulate(seed, draw, 0, ell_max_, acc);
  return from_fixed(acc);
}

KlSynthesizer::Bands KlSynthesizer::sample_bands(std::uint64_t seed, std::uint64_t draw,
                                                 int d_split) const {
  if (d_split < 1 || d_split >= ell_max_) {
    throw DomainError("band split must satisfy 1 <= d_split < ell_max");
  }
  std::vector<std::int64_t> lo(points_.size(), 0);
  std::vector<std::int64_t> hi(points_.size(), 0);
  accumulate(seed, draw, 0, d_split, lo);
  accumulate(seed, draw, d_split + 1, ell_max_, hi);
  std::vector<std::int64_t> full(points_.size());
  for (std::size_t i = 0; i < full.size(); ++i) full[i] = lo[i] + hi[i];
  return {from_fixed(lo), from_fixed(hi), from_fixed(full)};
}

FieldRealization synthesize_field(const CovarianceModel& model, const std::vector<Vec3>& dirs,
                                  const TimeGrid& grid, std::uint64_t seed, std::uint64_t draw) {
  if (dirs.empty()) throw DomainError("synthesize_field: empty space mesh");
  KlSynthesizer kl(model, lattice(dirs, grid));
  FieldRealization out;
  out.mesh = kl.points();
  out.values = kl.sample(seed, draw);
  out.seed = seed;
  out.draw = draw;
  out.ell_max = model.ell_max();
  out.backend = Backend::kKl;
  out.clipped_mass = kl.clipped_mass();
  return out;
}

Eigen::MatrixXd gram_matrix(const CovarianceModel& model, const std::vector<SpacetimePoint>& points) {
  check_points(points);
  if (points.size() > kDirectSamplerBudget) {
    throw ResourceError("direct sampler budget exceeded: " + std::to_string(points.size()) +
                        " points > " + std::to_string(kDirectSamplerBudget));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n, n);
  parallel_for(points.size(), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = point_cov(model, points[ui], points[j]);
  });
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

GaussianSampler::GaussianSampler(const CovarianceModel& model, std::vector<SpacetimePoint> points)
    : points_(std::move(points)), gram_(gram_matrix(model, points_)), factor_(factorize_psd(gram_)) {}

void GaussianSampler::draw(std::uint64_t seed, std::uint64_t draw, std::span<double> out) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (static_cast<Eigen::Index>(out.size()) != n) throw DomainError("GaussianSampler::draw: output size mismatch");
  StreamRng rng(seed, StreamDomain::kDirectSampler, static_cast<std::uint32_t>(draw >> 32),
                static_cast<std::uint32_t>(draw));
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  Eigen::Map<Eigen::VectorXd> x(out.data(), n);
  if (factor_.eigen_fallback) x.noalias() = factor_.root * z;
  else x.noalias() = factor_.root.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd GaussianSampler::draws(std::uint64_t seed, std::uint64_t first, std::size_t n) const {
  const auto np = static_cast<Eigen::Index>(points_.size());
  const auto nd = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd z(np, nd);
  parallel_for(n, [&](std::size_t j) {
    const std::uint64_t d = first + j;
    StreamRng rng(seed, StreamDomain::kDirectSampler, static_cast<std::uint32_t>(d >> 32),
                  static_cast<std::uint32_t>(d));
    for (Eigen::Index i = 0; i < np; ++i) z(i, static_cast<Eigen::Index>(j)) = rng.normal();
  });
  if (factor_.eigen_fallback) return factor_.root * z;
  return factor_.root.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd direct_gaussian_sample(const CovarianceModel& model,
                                       const std::vector<SpacetimePoint>& points,
                                       std::uint64_t seed, std::size_t n_draws) {
  GaussianSampler sampler(model, points);
  return sampler.draws(seed, 0, n_draws).transpose();
}

CovCheck compare_moments(const Eigen::MatrixXd& moments, const Eigen::MatrixXd& reference,
                         std::size_t n_samples) {
  if (n_samples == 0) throw DomainError("compare_moments: no samples");
  CovCheck out;
  out.n_samples = n_samples;
  const double n = static_cast<double>(n_samples);
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double err = std::abs(moments(i, j) - reference(i, j));
      const double se = std::sqrt((reference(i, i) * reference(j, j) + reference(i, j) * reference(i, j)) / n);
      out.max_abs_error = std::max(out.max_abs_error, err);
      out.max_se_units = std::max(out.max_se_units, se > 0.0 ? err / se : (err > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
  }
  return out;
}

CovCheck empirical_cov_check(const CovarianceModel& model,
                             const std::vector<SpacetimePoint>& points, std::size_t n_samples,
                             std::uint64_t seed, Backend backend) {
  if (n_samples == 0) throw DomainError("empirical_cov_check: n_samples must be positive");
  const Eigen::MatrixXd reference = gram_matrix(model, points);
  const auto np = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd samples(np, static_cast<Eigen::Index>(n_samples));
  if (backend == Backend::kDirect) {
    samples = GaussianSampler(model, points).draws(seed, 0, n_samples);
  } else {
    const KlSynthesizer kl(model, points);
    parallel_for(n_samples, [&](std::size_t d) {
      const auto v = kl.sample(seed, d);
      for (Eigen::Index i = 0; i < np; ++i) samples(i, static_cast<Eigen::Index>(d)) = v[i];
    });
  }
  const Eigen::MatrixXd moments = samples * samples.transpose() / static_cast<double>(n_samples);
  return compare_moments(moments, reference, n_samples);
}

}  // namespace spherefield
