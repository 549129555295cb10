#include "spherefield/conditioning.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spherefield/errors.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/linalg.hpp"
#include "spherefield/rng.hpp"
#include "spherefield/synthesis.hpp"

namespace spherefield {

ConditioningReport conditional_variance(const CovarianceModel& model, const SpacetimePoint& p0,
                                        const std::vector<SpacetimePoint>& cond) {
  if (cond.empty()) throw DomainError("conditional_variance: conditioning set is empty");
  for (const auto& p : cond) {
    if (p == p0) throw DomainError("conditional_variance: p0 appears in the conditioning set");
  }
  const auto n = static_cast<Eigen::Index>(cond.size());
  const Eigen::MatrixXd sigma = gram_matrix(model, cond);
  Eigen::VectorXd c(n);
  for (Eigen::Index j = 0; j < n; ++j) c(j) = point_cov(model, p0, cond[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) throw NumericalError("conditional_variance: eigensolve failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double cutoff = kPseudoInverseCutoff * lam.maxCoeff();
  ConditioningReport rep;
  rep.n = static_cast<int>(n);
  rep.regularization = cutoff;
  rep.sigma00 = model.variance();
  if (!(lam.maxCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "conditional_variance: degenerate conditioning Gram, spectrum [" << lam.transpose() << "]";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * c;
  double explained = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (lam(k) > cutoff) {
      explained += proj(k) * proj(k) / lam(k);
      ++rep.rank;
    }
  }
  rep.var = std::max(0.0, rep.sigma00 - explained);

  rep.comparator = std::numeric_limits<double>::infinity();
  for (const auto& p : cond) {
    rep.comparator = std::min(rep.comparator, std::pow(rho_alpha(model.params(), sphere_dist(p0.dir, p.dir)), 2));
  }
  if (rep.comparator > 0.0) {
    rep.ratio = rep.var / rep.comparator;
  } else {
    rep.degenerate_comparator = true;
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

ConditioningReport sln_bound_check(const CovarianceModel& model, const SpacetimePoint& p0,
                                   const std::vector<SpacetimePoint>& cond,
                                   const SlnRegime& regime) {
  ConditioningReport rep = conditional_variance(model, p0, cond);
  for (const auto& p : cond) {
    const double th = sphere_dist(p0.dir, p.dir);
    if (th < regime.theta_min || th > regime.theta_max) rep.in_regime = false;
  }
  return rep;
}

SlnSweep sln_sweep(const CovarianceModel& model, int n_configs, int max_points, double max_lag,
                   std::uint64_t seed, const SlnRegime& regime) {
  if (n_configs < 1 || max_points < 1) throw DomainError("sln_sweep: need configs and points");
  if (!(max_lag >= 0.0 && max_lag < 0.5)) throw DomainError("sln_sweep: max_lag must lie in [0, 0.5)");
  SlnSweep out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  const double two_pi = 2.0 * std::numbers::pi;
  for (int c = 0; c < n_configs; ++c) {
    StreamRng rng(seed, StreamDomain::kSweep, 0, static_cast<std::uint32_t>(c));
    SpacetimePoint p0{direction_from_angles(std::acos(2.0 * rng.uniform() - 1.0), two_pi * rng.uniform()), 0.0};
    const int n = 1 + static_cast<int>(rng.uniform() * max_points);
    std::vector<SpacetimePoint> cond;
    for (int k = 0; k < n; ++k) {
      const double th = regime.theta_min + (regime.theta_max - regime.theta_min) * rng.uniform();
      cond.push_back({geodesic_offset(p0.dir, th, two_pi * rng.uniform()),
                      max_lag * (2.0 * rng.uniform() - 1.0)});
    }
    auto rep = sln_bound_check(model, p0, cond, regime);
    if (rep.degenerate_comparator) ++out.n_degenerate;
    else out.min_ratio = std::min(out.min_ratio, rep.ratio);
    out.reports.push_back(rep);
  }
  return out;
}

SlnFit sln_exponent_fit(const CovarianceModel& model, const std::vector<double>& theta_ladder,
                        double t_lag, const SlnRegime& regime) {
  if (theta_ladder.size() < 2) throw DomainError("sln_exponent_fit: ladder needs at least two angles");
  SlnFit fit;
  const SpacetimePoint p0{{0.0, 0.0, 1.0}, 0.0};
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (double th : theta_ladder) {
    if (!(th > 0.0 && th <= 0.3)) throw DomainError("sln_exponent_fit: ladder must lie in (0, 0.3]");
    const SpacetimePoint p1{direction_from_angles(th, 0.0), t_lag};
    const auto rep = sln_bound_check(model, p0, {p1}, regime);
    fit.in_regime = fit.in_regime && rep.in_regime;
    if (!(rep.var > 0.0)) throw NumericalError("sln_exponent_fit: conditional variance vanished");
    fit.thetas.push_back(th);
    fit.vars.push_back(rep.var);
    const double x = std::log(th);
    const double y = std::log(rep.var);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double n = static_cast<double>(theta_ladder.size());
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (!(vx > 0.0)) throw DomainError("sln_exponent_fit: ladder angles must not all coincide");
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return fit;
}

PosdefReport posdef_check(const SpectrumParams& params, const SpacetimePoint& reference,
                          const std::vector<SpacetimePoint>& points, int ell) {
  if (points.empty() || points.size() > kPosdefMaxPoints) {
    throw DomainError("posdef_check: needs 1..12 points");
  }
  const double w = (2.0 * ell + 1.0) / (4.0 * std::numbers::pi);
  auto kernel = [&](const SpacetimePoint& a, const SpacetimePoint& b) {
    return cl_tau(params, ell, a.time - b.time) * w *
           legendre_eval(ell, std::clamp(dot(a.dir, b.dir), -1.0, 1.0));
  };
  const auto n = static_cast<Eigen::Index>(points.size());
  const double crr = kernel(reference, reference);
  Eigen::VectorXd cr(n);
  for (Eigen::Index j = 0; j < n; ++j) cr(j) = kernel(reference, points[j]);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      m(j, k) = m(k, j) = crr * kernel(points[j], points[k]) - cr(j) * cr(k);
    }
  }
  PosdefReport rep;
  rep.min_eigenvalue = min_eigenvalue(m);
  rep.scale = crr * crr;
  rep.trace = m.trace();
  rep.passed = rep.min_eigenvalue >= -1e-8 * rep.scale;
  return rep;
}

}  // namespace spherefield
