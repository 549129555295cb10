#include "spherefield/chung.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spherefield/errors.hpp"
#include "spherefield/geometry.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/parallel.hpp"

namespace spherefield {

double p_exponent(double alpha, double beta) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("beta out of (0,2)");
  if (!(alpha >= 2.0 + beta - 1e-12 && alpha < 4.0)) throw DomainError("alpha out of (2+beta,4)");
  return 1.0 / (2.0 / beta + 4.0 / (alpha - 2.0));
}

RateParams RateParams::from(double alpha, double beta) {
  return {p_exponent(alpha, beta), alpha, beta};
}

double phi_rate(const RateParams& rp, double r) {
  if (!(r > 0.0 && r < std::exp(-1.0))) throw DomainError("phi_rate: r must lie in (0, 1/e)");
  return std::pow(std::log(std::abs(std::log(r))) / (r * r * r), rp.p);
}

double psi_rate(const RateParams& rp, double r, double eps) {
  return r * r * r * std::pow(eps, -1.0 / rp.p);
}

int ladder_offset(double base) {
  if (!(base > 1.0)) throw DomainError("ladder base must exceed 1");
  int offset = 0;
  while (std::pow(base, -(1.0 + offset)) > kLiminfFirstRadius) ++offset;
  return offset;
}

LadderMesh ladder_mesh(const SpacetimePoint& center, double base, int n_levels, int n_space,
                       int n_time) {
  if (n_levels < 1) throw DomainError("ladder needs at least one level");
  LadderMesh out;
  out.offset = ladder_offset(base);
  out.points.push_back(center);
  out.level_of.push_back(n_levels - 1);
  for (int n = 0; n < n_levels; ++n) {
    const double r = std::pow(base, -(n + 1.0 + out.offset));
    if (r < kLiminfRadiusFloor) throw DomainError("ladder radius below the 1e-3 floor");
    out.radii.push_back(r);
    const BallMesh mesh = ball_mesh(center, r, n_space, n_time);
    for (std::size_t i = 1; i < mesh.points.size(); ++i) {
      out.points.push_back(mesh.points[i]);
      out.level_of.push_back(n);
    }
  }
  return out;
}

std::vector<LiminfTrace> empirical_liminf(const CovarianceModel& model,
                                          const SpacetimePoint& center, double base,
                                          int n_levels, int n_space, int n_time,
                                          const std::vector<std::uint64_t>& seeds) {
  const LadderMesh mesh = ladder_mesh(center, base, n_levels, n_space, n_time);
  const RateParams rp = RateParams::from(model.params());
  const GaussianSampler sampler(model, mesh.points);
  std::vector<LiminfTrace> traces(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    std::vector<double> field(mesh.points.size());
    sampler.draw(seeds[s], 0, field);
    // deepest[n] = max over points generated at level n
    std::vector<double> level_max(static_cast<std::size_t>(n_levels), 0.0);
    for (std::size_t i = 1; i < field.size(); ++i) {
      auto& slot = level_max[static_cast<std::size_t>(mesh.level_of[i])];
      slot = std::max(slot, std::abs(field[i] - field[0]));
    }
    LiminfTrace& tr = traces[s];
    tr.seed = seeds[s];
    tr.base = base;
    tr.offset = mesh.offset;
    tr.radii = mesh.radii;
    tr.m_hat.assign(static_cast<std::size_t>(n_levels), 0.0);
    // B_{r_n} contains the meshes of all deeper levels
    double acc = 0.0;
    for (int n = n_levels - 1; n >= 0; --n) {
      acc = std::max(acc, level_max[static_cast<std::size_t>(n)]);
      tr.m_hat[static_cast<std::size_t>(n)] = acc;
    }
    double run = std::numeric_limits<double>::infinity();
    for (int n = 0; n < n_levels; ++n) {
      const double ph = phi_rate(rp, tr.radii[n]);
      const double v = ph * tr.m_hat[n];
      if (!(v > 0.0)) tr.has_zero = true;
      run = std::min(run, v);
      tr.phi.push_back(ph);
      tr.values.push_back(v);
      tr.running_min.push_back(run);
    }
  });
  return traces;
}

KlSynthesizer::Bands band_decomposition(const CovarianceModel& model, int d_split,
                                        const std::vector<SpacetimePoint>& points,
                                        std::uint64_t seed, std::uint64_t draw) {
  if (d_split < 1 || d_split >= model.ell_max()) {
    throw DomainError("band_decomposition: need 1 <= d_split < ell_max (band empty)");
  }
  return KlSynthesizer(model, points).sample_bands(seed, draw, d_split);
}

double high_band_variance(const CovarianceModel& model, int d_split) {
  if (d_split < 0 || d_split >= model.ell_max()) throw DomainError("high_band_variance: band empty");
  double s = 0.0;
  const auto& w = model.weights();
  for (int l = model.ell_max(); l > d_split; --l) s += w[l];
  return s;
}

BandCheck band_independence_check(const CovarianceModel& model, int d_split,
                                  const std::vector<SpacetimePoint>& points,
                                  std::size_t n_draws, std::uint64_t seed) {
  if (d_split < 1 || d_split >= model.ell_max()) {
    throw DomainError("band_independence_check: need 1 <= d_split < ell_max");
  }
  if (n_draws < 2) throw DomainError("band_independence_check: need at least two draws");
  const KlSynthesizer kl(model, points);
  const auto np = static_cast<Eigen::Index>(points.size());
  const auto nd = static_cast<Eigen::Index>(n_draws);
  Eigen::MatrixXd lo(np, nd);
  Eigen::MatrixXd hi(np, nd);
  std::vector<char> exact(n_draws, 1);
  parallel_for(n_draws, [&](std::size_t d) {
    const auto b = kl.sample_bands(seed, d, d_split);
    for (Eigen::Index i = 0; i < np; ++i) {
      lo(i, static_cast<Eigen::Index>(d)) = b.low[i];
      hi(i, static_cast<Eigen::Index>(d)) = b.high[i];
      if (b.low[i] + b.high[i] != b.full[i]) exact[d] = 0;
    }
  });
  BandCheck out;
  out.n_draws = n_draws;
  out.exact_reconstruction = std::all_of(exact.begin(), exact.end(), [](char c) { return c != 0; });

  // Analytic band Grams from the band-restricted spectra.
  const auto& w = model.weights();
  auto band_gram = [&](int l0, int l1) {
    Eigen::MatrixXd g(np, np);
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const auto& a = points[static_cast<std::size_t>(i)];
        const auto& b = points[static_cast<std::size_t>(j)];
        const double f = time_factor(model.params(), a.time - b.time);
        const auto pl = legendre_batch(l1, std::clamp(dot(a.dir, b.dir), -1.0, 1.0));
        double s = 0.0;
        for (int l = l0; l <= l1; ++l) s += w[l] * pl.values[l];
        g(i, j) = g(j, i) = f * s;
      }
    }
    return g;
  };
  const Eigen::MatrixXd g_lo = band_gram(0, d_split);
  const Eigen::MatrixXd g_hi = band_gram(d_split + 1, model.ell_max());
  const double n = static_cast<double>(n_draws);
  const Eigen::MatrixXd cross = lo * hi.transpose() / n;
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      // independent bands: Var(x_i y_j) = S_lo,ii S_hi,jj
      const double se = std::sqrt(g_lo(i, i) * g_hi(j, j) / n);
      out.max_cross_se_units = std::max(out.max_cross_se_units, std::abs(cross(i, j)) / se);
    }
  }
  out.high_band = compare_moments(hi * hi.transpose() / n, g_hi, n_draws);
  return out;
}

}  // namespace spherefield
