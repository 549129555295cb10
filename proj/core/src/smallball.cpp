#include "spherefield/smallball.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spherefield/chung.hpp"
#include "spherefield/errors.hpp"
#include "spherefield/geometry.hpp"
#include "spherefield/synthesis.hpp"

namespace spherefield {
namespace {

// Fixed batch size: GEMM blocking depends on shape, so keeping it constant
// keeps the maxima independent of how many draws are requested.
constexpr std::int64_t kBatch = 1024;

void check_eps_grid(const std::vector<double>& eps) {
  if (eps.empty()) throw DomainError("eps grid is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw DomainError("eps grid must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw DomainError("eps grid must decrease strictly");
  }
}

}  // namespace

WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0 || k < 0 || k > n) throw DomainError("wilson_interval: need 0 <= k <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double mid = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

std::vector<double> ball_maxima(const CovarianceModel& model, const SpacetimePoint& center,
                                double r, int n_space, int n_time, std::int64_t n_samples,
                                std::uint64_t seed, double* clipped_mass) {
  if (n_samples < 1) throw DomainError("ball_maxima: need at least one sample");
  const BallMesh mesh = ball_mesh(center, r, n_space, n_time);
  std::vector<double> maxima(static_cast<std::size_t>(n_samples), 0.0);
  if (clipped_mass != nullptr) *clipped_mass = 0.0;
  if (mesh.points.size() == 1) return maxima;  // only the center: M == 0
  const GaussianSampler sampler(model, mesh.points);
  if (clipped_mass != nullptr) *clipped_mass = sampler.clipped_mass();
  for (std::int64_t first = 0; first < n_samples; first += kBatch) {
    const Eigen::MatrixXd x = sampler.draws(seed, static_cast<std::uint64_t>(first), kBatch);
    const std::int64_t take = std::min(kBatch, n_samples - first);
    for (std::int64_t j = 0; j < take; ++j) {
      const auto col = x.col(static_cast<Eigen::Index>(j));
      maxima[static_cast<std::size_t>(first + j)] = (col.array() - col(0)).abs().maxCoeff();
    }
  }
  return maxima;
}

SmallBallCurve curve_from_maxima(const std::vector<double>& maxima,
                                 const std::vector<double>& eps_grid) {
  check_eps_grid(eps_grid);
  if (maxima.empty()) throw DomainError("curve_from_maxima: no samples");
  std::vector<double> sorted = maxima;
  std::sort(sorted.begin(), sorted.end());
  SmallBallCurve c;
  c.eps_grid = eps_grid;
  c.n_samples = static_cast<std::int64_t>(maxima.size());
  for (double eps : eps_grid) {
    const auto k = static_cast<std::int64_t>(std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin());
    const auto ci = wilson_interval(k, c.n_samples);
    c.counts.push_back(k);
    c.p_hat.push_back(static_cast<double>(k) / static_cast<double>(c.n_samples));
    c.ci_lo.push_back(ci.lo);
    c.ci_hi.push_back(ci.hi);
    c.ci_half_width.push_back(0.5 * (ci.hi - ci.lo));
  }
  return c;
}

SmallBallCurve estimate_small_ball(const CovarianceModel& model, const SpacetimePoint& center,
                                   double r, const std::vector<double>& eps_grid,
                                   std::int64_t n_samples, int n_space, int n_time,
                                   std::uint64_t seed) {
  check_eps_grid(eps_grid);
  double clipped = 0.0;
  const auto maxima = ball_maxima(model, center, r, n_space, n_time, n_samples, seed, &clipped);
  SmallBallCurve c = curve_from_maxima(maxima, eps_grid);
  c.center = center;
  c.r = r;
  c.n_space = n_space;
  c.n_time = n_time;
  c.mesh_points = ball_mesh(center, r, n_space, n_time).points.size();
  c.ell_max = model.ell_max();
  c.seed = seed;
  c.clipped_mass = clipped;
  return c;
}

std::vector<std::size_t> usable_points(const SmallBallCurve& curve, const FitWindow& window) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < curve.p_hat.size(); ++i) {
    const double p = curve.p_hat[i];
    if (p >= window.p_lo && p <= window.p_hi && p < 1.0 && curve.counts[i] >= window.min_count) {
      idx.push_back(i);
    }
  }
  return idx;
}

ExponentFit fit_exponent(const SmallBallCurve& curve, const SpectrumParams& params,
                         const FitWindow& window) {
  const auto idx = usable_points(curve, window);
  if (idx.size() < 4) {
    throw DomainError("fit_exponent: " + std::to_string(idx.size()) +
                      " usable points in the fit window, need at least 4");
  }
  const double n = static_cast<double>(curve.n_samples);
  double sw = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys, ws;
  for (std::size_t i : idx) {
    const double p = curve.p_hat[i];
    const double lp = std::log(p);
    const double var = (1.0 - p) / (n * p * lp * lp);
    const double w = 1.0 / var;
    xs.push_back(std::log(curve.eps_grid[i]));
    ys.push_back(std::log(-lp));
    ws.push_back(w);
    sw += w;
    sx += w * xs.back();
    sy += w * ys.back();
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += ws[k] * (xs[k] - mx) * (xs[k] - mx);
    sxy += ws[k] * (xs[k] - mx) * (ys[k] - my);
    syy += ws[k] * (ys[k] - my) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_exponent: degenerate eps window");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.implied_p = -1.0 / f.slope;
  f.theory_p = p_exponent(params.alpha, params.beta);
  f.eps_hi = curve.eps_grid[idx.front()];
  f.eps_lo = curve.eps_grid[idx.back()];
  f.n_points = static_cast<int>(idx.size());
  return f;
}

BoundsEstimate bounds_consistency(const SmallBallCurve& curve, const SpectrumParams& params,
                                  const FitWindow& window) {
  const auto idx = usable_points(curve, window);
  if (idx.empty()) throw DomainError("bounds_consistency: empty fit window");
  if (!(curve.r > 0.0)) throw DomainError("bounds_consistency: curve radius unset");
  const RateParams rp = RateParams::from(params);
  BoundsEstimate b;
  b.a1_hat = std::numeric_limits<double>::infinity();
  b.a2_hat = 0.0;
  for (std::size_t i : idx) {
    const double v = -std::log(curve.p_hat[i]) / psi_rate(rp, curve.r, curve.eps_grid[i]);
    b.a1_hat = std::min(b.a1_hat, v);
    b.a2_hat = std::max(b.a2_hat, v);
  }
  b.consistent = b.a1_hat > 0.0 && b.a1_hat <= b.a2_hat;
  return b;
}

std::vector<KappaPoint> kappa_estimate(const SmallBallCurve& curve, const SpectrumParams& params,
                                       const FitWindow& window) {
  const auto idx = usable_points(curve, window);
  if (idx.empty()) throw DomainError("kappa_estimate: empty fit window");
  if (!(curve.r > 0.0)) throw DomainError("kappa_estimate: curve radius unset");
  const double inv_p = 1.0 / p_exponent(params.alpha, params.beta);
  const double r3 = curve.r * curve.r * curve.r;
  std::vector<KappaPoint> out;
  for (std::size_t i : idx) {
    const double e = curve.eps_grid[i];
    const double s = std::pow(e, inv_p) / r3;
    KappaPoint k;
    k.eps = e;
    k.value = s * -std::log(curve.p_hat[i]);
    k.lo = s * -std::log(curve.ci_hi[i]);
    k.hi = s * -std::log(curve.ci_lo[i]);
    out.push_back(k);
  }
  return out;
}

KappaOverlap kappa_overlap(const std::vector<KappaPoint>& a, const std::vector<KappaPoint>& b) {
  KappaOverlap o;
  for (const auto& ka : a) {
    for (const auto& kb : b) {
      if (ka.eps != kb.eps) continue;
      ++o.n_shared;
      const double half = 0.5 * (ka.hi - ka.lo) + 0.5 * (kb.hi - kb.lo);
      const double gap = std::abs(ka.value - kb.value);
      double ratio = half > 0.0 ? gap / half : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (std::isnan(ratio)) ratio = std::numeric_limits<double>::infinity();
      o.worst_gap = std::max(o.worst_gap, ratio);
    }
  }
  o.overlap = o.n_shared > 0 && o.worst_gap <= 2.0;
  return o;
}

std::vector<double> eps_ladder(double eps_hi, double eps_lo, int n) {
  if (!(eps_hi > eps_lo && eps_lo > 0.0) || n < 2) throw DomainError("eps_ladder: need eps_hi > eps_lo > 0, n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = std::log(eps_lo / eps_hi) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = eps_hi * std::exp(step * i);
  out.back() = eps_lo;
  return out;
}

}  // namespace spherefield
