#include "spherefield/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spherefield/errors.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/rng.hpp"

namespace spherefield {
namespace {
constexpr double kBoundarySlack = 1e-12;
}  // namespace

GProfile GProfile::tabulated(std::vector<double> values_from_one) {
  if (values_from_one.empty()) throw DomainError("GProfile: empty table");
  for (double g : values_from_one) {
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("GProfile: entries must be positive");
  }
  GProfile g;
  g.table_ = std::move(values_from_one);
  return g;
}

double GProfile::operator()(int ell) const {
  if (table_.empty() || ell < 1) return 1.0;
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(ell) - 1, table_.size() - 1);
  return table_[idx];
}

std::string GProfile::describe() const {
  if (table_.empty()) return "const:1";
  return "table:" + std::to_string(table_.size());
}

std::vector<std::string> SpectrumParams::violations() const {
  std::vector<std::string> out;
  const bool beta_ok = beta > 0.0 && beta < 2.0;
  if (!beta_ok) out.emplace_back("beta out of (0,2)");
  // The boundary alpha == 2 + beta (e.g. alpha = 3, beta = 1) is admitted.
  // With beta itself invalid only the beta-free part (2,4) is checked, so a
  // single bad input reports a single violation.
  const bool alpha_lo_ok = beta_ok ? alpha >= 2.0 + beta - kBoundarySlack : alpha > 2.0;
  if (!(alpha_lo_ok && alpha < 4.0)) out.emplace_back("alpha out of (2+beta,4)");
  if (!(c0 >= 1.0)) out.emplace_back("c0 < 1");
  if (!(c1 > 0.0)) out.emplace_back("c1 <= 0");
  if (!g_profile.is_constant()) {
    const auto& t = g_profile.table();
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    if (*lo < 1.0 / c0 || *hi > c0) out.emplace_back("g_profile outside [1/c0, c0]");
  }
  return out;
}

void SpectrumParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "spectrum parameters violate the admissible ranges:";
  for (const auto& s : v) msg << ' ' << s << ';';
  throw DomainError(msg.str());
}

SpectrumParams SpectrumParams::make(double alpha, double beta, double c0, double c1, GProfile g) {
  SpectrumParams p{alpha, beta, c0, c1, std::move(g)};
  p.validate();
  return p;
}

double cl_zero(const SpectrumParams& params, int ell) {
  if (ell < 0) throw DomainError("cl_zero: negative degree");
  if (ell == 0) return params.c1;
  return params.g_profile(ell) * std::pow(static_cast<double>(ell), -params.alpha);
}

double time_factor(const SpectrumParams& params, double tau) {
  const double a = std::abs(tau);
  if (!(a < 1.0)) throw DomainError("time lag |tau| >= 1 is outside the model's validity window");
  return 1.0 - std::pow(a, params.beta);
}

double cl_tau(const SpectrumParams& params, int ell, double tau) {
  return cl_zero(params, ell) * time_factor(params, tau);
}

double tail_bound(const SpectrumParams& params, int ell_max) {
  if (ell_max < 1) return std::numeric_limits<double>::infinity();
  const double L = ell_max;
  const double a = params.alpha;
  const double integral = 2.0 * std::pow(L, 2.0 - a) / (a - 2.0) + std::pow(L, 1.0 - a) / (a - 1.0);
  return params.c0 * integral / (4.0 * std::numbers::pi);
}

CovarianceModel::CovarianceModel(SpectrumParams params, int ell_max)
    : params_(std::move(params)), ell_max_(ell_max) {
  params_.validate();
  if (ell_max_ < 0 || ell_max_ > kMaxDegree) {
    throw ResourceError("CovarianceModel: ell_max " + std::to_string(ell_max_) +
                        " outside [0, " + std::to_string(kMaxDegree) + "]");
  }
  tail_bound_ = spherefield::tail_bound(params_, std::max(ell_max_, 1));
  weights_.resize(static_cast<std::size_t>(ell_max_) + 1);
  variance_ = 0.0;
  increment_scale_ = 0.0;
  for (int l = 0; l <= ell_max_; ++l) {
    weights_[l] = (2.0 * l + 1.0) / (4.0 * std::numbers::pi) * cl_zero(params_, l);
    variance_ += weights_[l];
    if (l >= 1) increment_scale_ += 2.0 * weights_[l];
  }
}

double CovarianceModel::spatial_cov(double cos_angle) const {
  const double x = std::clamp(cos_angle, -1.0, 1.0);
  double prev = 1.0;
  double cur = x;
  double sum = weights_[0];
  if (ell_max_ >= 1) sum += weights_[1] * x;
  for (int l = 1; l < ell_max_; ++l) {
    const double next = ((2.0 * l + 1.0) * x * cur - l * prev) / (l + 1.0);
    prev = cur;
    cur = next;
    sum += weights_[l + 1] * cur;
  }
  return sum;
}

double gamma_cov(const CovarianceModel& model, double cos_angle, double tau) {
  if (!(std::abs(cos_angle) <= 1.0 + 1e-12)) throw DomainError("gamma_cov: cos_angle outside [-1,1]");
  const double f = time_factor(model.params(), tau);
  return f * model.spatial_cov(cos_angle);
}

double point_cov(const CovarianceModel& model, const SpacetimePoint& p, const SpacetimePoint& q) {
  return gamma_cov(model, std::clamp(dot(p.dir, q.dir), -1.0, 1.0), p.time - q.time);
}

double canonical_dist_sq(const CovarianceModel& model, const SpacetimePoint& p,
                         const SpacetimePoint& q) {
  const double tau = p.time - q.time;
  const double f = time_factor(model.params(), tau);
  const double theta = sphere_dist(p.dir, q.dir);
  double spatial = 0.0;
  if (theta > 0.0) {
    const auto d = one_minus_legendre_cos(model.ell_max(), theta);
    const auto& w = model.weights();
    for (int l = 1; l <= model.ell_max(); ++l) spatial += 2.0 * w[l] * d[l];
  }
  return (1.0 - f) * model.increment_scale() + f * spatial;
}

double mu_dist_sq(const SpectrumParams& params, const SpacetimePoint& p, const SpacetimePoint& q) {
  const double f = time_factor(params, p.time - q.time);
  const double theta = sphere_dist(p.dir, q.dir);
  return (1.0 - f) + f * std::pow(theta, params.alpha - 2.0);
}

double rho_alpha(const SpectrumParams& params, double t) {
  if (!(t >= 0.0)) throw DomainError("rho_alpha: negative argument");
  return std::pow(t, 0.5 * (params.alpha - 2.0));
}

CovarianceModel select_truncation(const SpectrumParams& params, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw DomainError("select_truncation: tolerance must be positive");
  if (tail_bound(params, kMaxDegree) > tol) {
    throw ResourceError("select_truncation: tolerance unreachable below degree cap " +
                        std::to_string(kMaxDegree));
  }
  int hi = 1;
  while (tail_bound(params, hi) > tol) hi = std::min(2 * hi, kMaxDegree);
  int lo = hi / 2;  // tail(lo) > tol unless lo == 0
  if (lo < 1) return CovarianceModel(params, hi);
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (tail_bound(params, mid) <= tol) hi = mid;
    else lo = mid;
  }
  return CovarianceModel(params, hi);
}

RatioEnvelope equivalence_ratio_scan(const CovarianceModel& model, int n_pairs, double max_theta,
                                     double max_tau, std::uint64_t seed) {
  if (n_pairs < 1) throw DomainError("equivalence_ratio_scan: n_pairs must be >= 1");
  if (!(max_theta > 0.0 && max_theta <= std::numbers::pi)) {
    throw DomainError("equivalence_ratio_scan: max_theta out of range");
  }
  if (!(max_tau >= 0.0 && max_tau < 1.0)) {
    throw DomainError("equivalence_ratio_scan: max_tau must lie in [0, 1)");
  }
  StreamRng rng(seed, StreamDomain::kPairScan, 0, 0);
  RatioEnvelope env;
  env.min_ratio = std::numeric_limits<double>::infinity();
  env.max_ratio = 0.0;
  env.n_pairs = n_pairs;
  for (int i = 0; i < n_pairs; ++i) {
    SpacetimePoint p;
    SpacetimePoint q;
    do {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      p.dir = direction_from_angles(std::acos(z), phi);
      p.time = 0.5 * rng.uniform();
      const double theta = max_theta * rng.uniform();
      q.dir = geodesic_offset(p.dir, theta, 2.0 * std::numbers::pi * rng.uniform());
      q.time = p.time + max_tau * (2.0 * rng.uniform() - 1.0);
    } while (p == q);
    const double ratio = canonical_dist_sq(model, p, q) / mu_dist_sq(model.params(), p, q);
    env.min_ratio = std::min(env.min_ratio, ratio);
    env.max_ratio = std::max(env.max_ratio, ratio);
  }
  return env;
}

}  // namespace spherefield
