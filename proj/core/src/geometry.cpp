#include "spherefield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spherefield/errors.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/quadrature.hpp"
#include "spherefield/rng.hpp"

namespace spherefield {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_unit(const Vec3& v) {
  if (!(std::abs(norm(v) - 1.0) <= kUnitTolerance)) {
    throw DomainError("direction is not a unit vector (norm " + std::to_string(norm(v)) + ")");
  }
}

// Chord-based geodesic distance; no validation, for inner loops.
double fast_sphere_dist(const Vec3& x, const Vec3& y) {
  const double dx = x[0] - y[0];
  const double dy = x[1] - y[1];
  const double dz = x[2] - y[2];
  const double chord = std::sqrt(dx * dx + dy * dy + dz * dz);
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

void check_ball_radius(double r) {
  if (!(r > 0.0 && r <= 0.5)) throw DomainError("ball radius must lie in (0, 0.5]");
}

SpacetimePoint random_cap_point(StreamRng& rng, const SpacetimePoint& center, double theta_max,
                                double& theta_out) {
  const double cos_min = std::cos(theta_max);
  const double z = 1.0 - rng.uniform() * (1.0 - cos_min);
  // theta from z without cancellation: 1 - z = 2 sin^2(theta/2)
  theta_out = 2.0 * std::asin(std::sqrt(std::max(0.0, 0.5 * (1.0 - z))));
  SpacetimePoint p;
  p.dir = geodesic_offset(center.dir, theta_out, kTwoPi * rng.uniform());
  p.time = center.time;
  return p;
}

}  // namespace

Vec3 direction_from_angles(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

std::array<double, 2> angles_from_direction(const Vec3& dir) {
  const double theta = std::atan2(std::hypot(dir[0], dir[1]), dir[2]);
  double phi = std::atan2(dir[1], dir[0]);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {theta, phi};
}

SpacetimePoint SpacetimePoint::checked(const Vec3& dir, double time) {
  check_unit(dir);
  if (!std::isfinite(time)) throw DomainError("SpacetimePoint: non-finite time");
  return {dir, time};
}

SpacetimePoint SpacetimePoint::from_angles(double theta, double phi, double time) {
  return {direction_from_angles(theta, phi), time};
}

double sphere_dist(const Vec3& x, const Vec3& y) {
  check_unit(x);
  check_unit(y);
  return std::atan2(norm(cross(x, y)), dot(x, y));
}

Vec3 geodesic_offset(const Vec3& center, double rho, double azimuth) {
  // Frame: e1 orthogonal to center, built from the least aligned axis.
  const std::size_t axis = std::abs(center[0]) < std::abs(center[1])
                               ? (std::abs(center[0]) < std::abs(center[2]) ? 0 : 2)
                               : (std::abs(center[1]) < std::abs(center[2]) ? 1 : 2);
  Vec3 a{0.0, 0.0, 0.0};
  a[axis] = 1.0;
  Vec3 e1 = cross(center, a);
  const double n1 = norm(e1);
  for (double& v : e1) v /= n1;
  const Vec3 e2 = cross(center, e1);
  const double c = std::cos(rho);
  const double s = std::sin(rho);
  const double ca = std::cos(azimuth);
  const double sa = std::sin(azimuth);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = c * center[i] + s * (ca * e1[i] + sa * e2[i]);
  const double n = norm(out);
  for (double& v : out) v /= n;
  return out;
}

double product_dist(const SpacetimePoint& p, const SpacetimePoint& q, double q_exponent) {
  if (!(q_exponent >= 1.0)) throw DomainError("product_dist: exponent must be >= 1");
  const double tau = std::abs(p.time - q.time);
  const double theta = sphere_dist(p.dir, q.dir);
  if (std::isinf(q_exponent)) return std::max(tau, theta);
  if (q_exponent == 2.0) return std::hypot(tau, theta);
  return std::pow(std::pow(tau, q_exponent) + std::pow(theta, q_exponent), 1.0 / q_exponent);
}

BallMesh ball_mesh(const SpacetimePoint& center, double r, int n_space, int n_time) {
  check_ball_radius(r);
  check_unit(center.dir);
  if (n_space < 1 || n_time < 1) throw DomainError("ball_mesh: resolutions must be >= 1");
  BallMesh mesh;
  mesh.center = center;
  mesh.radius = r;
  mesh.n_space = n_space;
  mesh.n_time = n_time;
  mesh.points.reserve(static_cast<std::size_t>(n_space) * n_space * n_time + 1);
  mesh.points.push_back(center);
  for (int j = 0; j < n_time; ++j) {
    const double s = n_time == 1 ? 0.0 : -r + (j + 0.5) * 2.0 * r / n_time;
    const double cap = std::sqrt(r * r - s * s);
    for (int k = 0; k < n_space; ++k) {
      const double rho = cap * k / n_space;
      const int count = k == 0 ? 1 : 2 * k + 1;
      for (int i = 0; i < count; ++i) {
        if (k == 0 && s == 0.0) continue;  // that is the center itself
        SpacetimePoint p;
        p.dir = k == 0 ? center.dir : geodesic_offset(center.dir, rho, kTwoPi * i / count);
        p.time = center.time + s;
        mesh.points.push_back(p);
      }
    }
  }
  return mesh;
}

std::vector<SpacetimePoint> sample_ball(const SpacetimePoint& center, double r, int n,
                                        std::uint64_t seed) {
  check_unit(center.dir);
  if (!(r > 0.0)) throw DomainError("sample_ball: radius must be positive");
  StreamRng rng(seed, StreamDomain::kGeometryProbe, 0, 0);
  std::vector<SpacetimePoint> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  while (static_cast<int>(out.size()) < n) {
    double theta = 0.0;
    SpacetimePoint p = random_cap_point(rng, center, r, theta);
    const double s = r * (2.0 * rng.uniform() - 1.0);
    if (theta * theta + s * s >= r * r) continue;
    p.time = center.time + s;
    out.push_back(p);
  }
  return out;
}

double fill_distance(const BallMesh& mesh, int n_probe, std::uint64_t seed) {
  const auto probes = sample_ball(mesh.center, mesh.radius, n_probe, seed);
  double worst = 0.0;
  for (const auto& pr : probes) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : mesh.points) {
      best = std::min(best, std::hypot(pr.time - m.time, fast_sphere_dist(pr.dir, m.dir)));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

CoveringEstimate covering_number(const CovarianceModel& model, const SpacetimePoint& center,
                                 double r, double eps, NetMetric metric, std::uint64_t seed,
                                 int n_probe) {
  check_ball_radius(r);
  if (!(eps > 0.0)) throw DomainError("covering_number: eps must be positive");
  if (n_probe < 1) throw DomainError("covering_number: need at least one probe");
  const SpectrumParams& params = model.params();

  std::vector<SpacetimePoint> probes;
  probes.reserve(static_cast<std::size_t>(n_probe) + 1);
  probes.push_back(center);
  for (auto& p : sample_ball(center, r, n_probe, seed)) probes.push_back(p);

  // Canonical metric: tabulate the spatial series on [0, 2r] once.
  constexpr int kTable = 4096;
  std::vector<double> spatial_table;
  const double theta_span = 2.0 * r;
  if (metric == NetMetric::kCanonical) {
    spatial_table.resize(kTable + 1);
    const auto& w = model.weights();
    for (int i = 0; i <= kTable; ++i) {
      const auto d = one_minus_legendre_cos(model.ell_max(), theta_span * i / kTable);
      double s = 0.0;
      for (int l = 1; l <= model.ell_max(); ++l) s += 2.0 * w[l] * d[l];
      spatial_table[i] = s;
    }
  }
  const double s0 = model.increment_scale();

  auto dist = [&](const SpacetimePoint& a, const SpacetimePoint& b) {
    const double lag = std::pow(std::abs(a.time - b.time), params.beta);
    const double theta = fast_sphere_dist(a.dir, b.dir);
    if (metric == NetMetric::kMu) {
      return std::sqrt(lag + (1.0 - lag) * std::pow(theta, params.alpha - 2.0));
    }
    const double x = std::min(theta / theta_span, 1.0) * kTable;
    const int i = std::min(static_cast<int>(x), kTable - 1);
    const double frac = x - i;
    const double spatial = spatial_table[i] + frac * (spatial_table[i + 1] - spatial_table[i]);
    return std::sqrt(lag * s0 + (1.0 - lag) * spatial);
  };

  std::vector<double> dmin(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) dmin[i] = dist(probes[i], probes[0]);
  int net = 1;
  for (;;) {
    const auto it = std::max_element(dmin.begin(), dmin.end());
    if (*it < eps) break;
    const SpacetimePoint pick = probes[static_cast<std::size_t>(it - dmin.begin())];
    ++net;
    for (std::size_t i = 0; i < probes.size(); ++i) dmin[i] = std::min(dmin[i], dist(probes[i], pick));
  }
  return {net, n_probe, eps};
}

double volume_exponent(const SpectrumParams& params) {
  return 2.0 / params.beta + 4.0 / (params.alpha - 2.0);
}

VolumeEstimate mu_ball_volume_mc(const SpectrumParams& params, double eps, int n_samples,
                                 std::uint64_t seed) {
  params.validate();
  if (!(eps > 0.0)) throw DomainError("mu_ball_volume_mc: eps must be positive");
  if (n_samples < 1000) throw DomainError("mu_ball_volume_mc: need at least 1000 samples");
  const double theta_box = std::min(std::pow(eps, 2.0 / (params.alpha - 2.0)), 1.0);
  const double lag_box = std::min(std::pow(eps, 2.0 / params.beta), 1.0);
  const double one_minus_cos = 2.0 * std::pow(std::sin(0.5 * theta_box), 2);
  const double box = kTwoPi * one_minus_cos * 2.0 * lag_box;
  const double eps2 = eps * eps;
  StreamRng rng(seed, StreamDomain::kVolumeMc, 0, 0);
  std::int64_t hits = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double one_minus_z = rng.uniform() * one_minus_cos;
    const double theta = 2.0 * std::asin(std::sqrt(0.5 * one_minus_z));
    const double lag = std::abs(lag_box * (2.0 * rng.uniform() - 1.0));
    // lag < 1 always holds: lag_box <= 1 and uniform() < 1.
    const double lb = std::pow(lag, params.beta);
    if (lb + (1.0 - lb) * std::pow(theta, params.alpha - 2.0) < eps2) ++hits;
  }
  const double frac = static_cast<double>(hits) / n_samples;
  return {box * frac, box * std::sqrt(frac * (1.0 - frac) / n_samples), n_samples};
}

double volume_prefactor(const SpectrumParams& params, double eps) {
  params.validate();
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("volume_prefactor: eps must lie in [0, 1)");
  const double a2 = params.alpha - 2.0;
  const double inv_beta = 1.0 / params.beta;
  const double theta_max = std::pow(eps, 2.0 / a2);
  const double eps2 = eps * eps;
  auto integrand = [&](double u) {
    const double ua = std::pow(u, a2);
    const double ratio = (1.0 - ua) / (1.0 - eps2 * ua);
    const double arg = theta_max * u;
    const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
    return u * std::pow(std::max(ratio, 0.0), inv_beta) * sinc;
  };
  return 4.0 * std::numbers::pi * integrate(integrand, 0.0, 1.0, 1e-10).value;
}

double product_ball_volume(double r) {
  if (!(r > 0.0 && r <= std::numbers::pi)) throw DomainError("product_ball_volume: radius out of range");
  // theta = r sin t removes the square-root endpoint
  auto integrand = [r](double t) {
    const double c = std::cos(t);
    return std::sin(r * std::sin(t)) * r * r * c * c;
  };
  return 4.0 * std::numbers::pi * integrate(integrand, 0.0, 0.5 * std::numbers::pi, 1e-12).value;
}

VolumeEstimate product_ball_volume_mc(double r, int n_samples, std::uint64_t seed) {
  if (!(r > 0.0 && r <= 0.5)) throw DomainError("product_ball_volume_mc: radius out of (0, 0.5]");
  if (n_samples < 1000) throw DomainError("product_ball_volume_mc: need at least 1000 samples");
  const double one_minus_cos = 2.0 * std::pow(std::sin(0.5 * r), 2);
  const double box = kTwoPi * one_minus_cos * 2.0 * r;
  StreamRng rng(seed, StreamDomain::kVolumeMc, 1, 0);
  std::int64_t hits = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double theta = 2.0 * std::asin(std::sqrt(0.5 * rng.uniform() * one_minus_cos));
    const double s = r * (2.0 * rng.uniform() - 1.0);
    if (theta * theta + s * s < r * r) ++hits;
  }
  const double frac = static_cast<double>(hits) / n_samples;
  return {box * frac, box * std::sqrt(frac * (1.0 - frac) / n_samples), n_samples};
}

}  // namespace spherefield
