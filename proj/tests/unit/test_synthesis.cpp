#include "doctest.h"

#include <cmath>
#include <numbers>

#include "spherefield/errors.hpp"
#include "spherefield/synthesis.hpp"

using namespace spherefield;

namespace {

std::vector<Vec3> some_dirs() {
  return {direction_from_angles(0.3, 0.1), direction_from_angles(1.2, 2.0), direction_from_angles(2.5, 4.0),
          direction_from_angles(1.0, 5.5), direction_from_angles(0.05, 3.0)};
}

}  // namespace

TEST_CASE("time grid validation") {
  CHECK_NOTHROW(TimeGrid::make({0.0}));
  CHECK_THROWS_AS(TimeGrid::make({}), DomainError);
  CHECK_THROWS_AS(TimeGrid::make({0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(TimeGrid::make({0.0, 1.2}), DomainError);
  CHECK(TimeGrid::make({0.1, 0.4, 0.9}).window_length() == doctest::Approx(0.8));
}

TEST_CASE("coefficient paths") {
  const auto p = SpectrumParams::make(3.0, 1.0);
  const auto single = sample_alm_paths(p, 2, TimeGrid::make({0.0}), 5);
  CHECK(single.paths.rows() == 5);
  CHECK(single.paths.cols() == 1);
  CHECK(single.clipped_mass == 0.0);

  // grid {0, 0.5}, beta = 1: correlation 0.5
  const auto g2 = TimeGrid::make({0.0, 0.5});
  double s00 = 0, s11 = 0, s01 = 0;
  const int n = 4000;
  for (int d = 0; d < n; ++d) {
    const auto cp = sample_alm_paths(p, 1, g2, 9, d);
    for (int m = 0; m < 3; ++m) {
      s00 += cp.paths(m, 0) * cp.paths(m, 0);
      s11 += cp.paths(m, 1) * cp.paths(m, 1);
      s01 += cp.paths(m, 0) * cp.paths(m, 1);
    }
  }
  const double corr = s01 / std::sqrt(s00 * s11);
  CHECK(std::abs(corr - 0.5) < 5.0 * (1 - 0.25) / std::sqrt(3.0 * n));
  CHECK(s00 / (3.0 * n) == doctest::Approx(1.0).epsilon(5.0 * std::sqrt(2.0 / (3.0 * n))));

  // beta = 0.5 on a 20-point grid over [0, 0.9]
  const auto ph = SpectrumParams::make(3.0, 0.5);
  std::vector<double> t;
  for (int i = 0; i < 20; ++i) t.push_back(0.9 * i / 19.0);
  const auto g20 = TimeGrid::make(t);
  const Eigen::MatrixXd k = temporal_gram(ph, g20) * cl_zero(ph, 3);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(20, 20);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto cp = sample_alm_paths(ph, 3, g20, 21, d);
    const Eigen::VectorXd v = cp.paths.row(0).transpose();
    acc += v * v.transpose();
  }
  CHECK(compare_moments(acc / draws, k, draws).max_se_units <= 5.0);
}

TEST_CASE("no clipping on moderate grids") {
  for (double beta : {0.5, 1.0, 1.5}) {
    const auto p = SpectrumParams::make(3.0 + 0.5 * beta, beta);
    std::vector<double> t;
    for (int i = 0; i < 50; ++i) t.push_back(0.9 * i / 49.0);
    const auto f = factorize_psd(temporal_gram(p, TimeGrid::make(t)));
    CHECK(f.clipped_mass == 0.0);
    CHECK_FALSE(f.eigen_fallback);
  }
}

TEST_CASE("eigen fallback records clipped mass") {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  const auto f = factorize_psd(k);
  CHECK(f.eigen_fallback);
  CHECK(f.clipped_mass == doctest::Approx(1.0));
  CHECK_THROWS_AS(factorize_psd(-Eigen::MatrixXd::Identity(2, 2)), NumericalError);
}

TEST_CASE("KL synthesis") {
  const CovarianceModel m0(SpectrumParams::make(3.0, 1.0), 0);
  const auto grid = TimeGrid::make({0.0, 0.3});
  const auto f0 = synthesize_field(m0, some_dirs(), grid, 4);
  // monopole only: constant in space at each time
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(f0.values[i] == f0.values[0]);
    CHECK(f0.values[5 + i] == f0.values[5]);
  }
  const auto alm = sample_alm_paths(m0.params(), 0, grid, 4, 0);
  CHECK(f0.values[0] == doctest::Approx(alm.paths(0, 0) / std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-9));

  const CovarianceModel m(SpectrumParams::make(3.0, 1.0), 20);
  const auto a = synthesize_field(m, some_dirs(), grid, 77);
  const auto b = synthesize_field(m, some_dirs(), grid, 77);
  CHECK(a.values == b.values);
  CHECK(a.values != synthesize_field(m, some_dirs(), grid, 78).values);
  CHECK(a.mesh.size() == 10);
}

TEST_CASE("KL pointwise variance and isotropy") {
  const CovarianceModel m(SpectrumParams::make(3.0, 1.0), 15);
  const Vec3 x = direction_from_angles(0.8, 0.3);
  // a fixed rotation about the y axis
  const double c = std::cos(1.1), s = std::sin(1.1);
  const Vec3 rx{c * x[0] + s * x[2], x[1], -s * x[0] + c * x[2]};
  const KlSynthesizer k1(m, {{x, 0.0}});
  const KlSynthesizer k2(m, {{rx, 0.0}});
  const int n = 10000;
  double s1 = 0, s2 = 0, m1 = 0, m2 = 0;
  for (int d = 0; d < n; ++d) {
    const double v1 = k1.sample(3, d)[0];
    const double v2 = k2.sample(4, d)[0];
    s1 += v1 * v1; s2 += v2 * v2; m1 += v1; m2 += v2;
  }
  const double var = m.variance();
  const double se = var * std::sqrt(2.0 / n);
  CHECK(std::abs(s1 / n - var) < 5 * se);
  CHECK(std::abs(s2 / n - var) < 5 * se);
  CHECK(std::abs(m1 / n) < 5 * std::sqrt(var / n));
  CHECK(std::abs(m2 / n) < 5 * std::sqrt(var / n));
}

TEST_CASE("direct sampler") {
  const CovarianceModel m(SpectrumParams::make(3.0, 1.0), 30);
  const SpacetimePoint p{{0, 0, 1}, 0.0};
  const auto one = direct_gaussian_sample(m, {p}, 1, 20000);
  const double v = one.col(0).squaredNorm() / 20000.0;
  CHECK(std::abs(v - m.variance()) < 5 * m.variance() * std::sqrt(2.0 / 20000));

  // antipodes: correlation sum w_l (-1)^l / Gamma(1,0)
  const SpacetimePoint q{{0, 0, -1}, 0.0};
  GaussianSampler gs(m, {p, q});
  double alt = 0.0;
  for (int l = 0; l <= 30; ++l) alt += m.weights()[l] * ((l % 2) ? -1.0 : 1.0);
  CHECK(gs.gram()(0, 1) / gs.gram()(0, 0) == doctest::Approx(alt / m.variance()).epsilon(1e-12));

  // draws are addressed by index
  const Eigen::MatrixXd batch = gs.draws(5, 10, 3);
  std::vector<double> single(2);
  gs.draw(5, 11, single);
  CHECK(single[0] == doctest::Approx(batch(0, 1)).epsilon(1e-14));
  CHECK(single[1] == doctest::Approx(batch(1, 1)).epsilon(1e-14));
  CHECK_THROWS_AS(gram_matrix(m, {{p.dir, 0.0}, {p.dir, 1.0}}), DomainError);
}

TEST_CASE("stationarity: shifted grids give identical Grams") {
  const CovarianceModel m(SpectrumParams::make(3.3, 0.8), 25);
  auto pts = lattice(some_dirs(), TimeGrid::make({0.0, 0.25, 0.5}));
  auto shifted = pts;
  for (auto& p : shifted) p.time += 0.25;
  CHECK(gram_matrix(m, pts) == gram_matrix(m, shifted));
}

TEST_CASE("cross-backend covariance") {
  const CovarianceModel m(SpectrumParams::make(3.0, 1.0), 30);
  const auto pts = lattice(some_dirs(), TimeGrid::make({0.0, 0.2, 0.5}));
  const auto kl = empirical_cov_check(m, pts, 5000, 2, Backend::kKl);
  const auto direct = empirical_cov_check(m, pts, 5000, 2, Backend::kDirect);
  CHECK(kl.max_se_units <= 5.0);
  CHECK(direct.max_se_units <= 5.0);
  const auto small = empirical_cov_check(m, pts, 500, 3, Backend::kDirect);
  const auto big = empirical_cov_check(m, pts, 50000, 3, Backend::kDirect);
  CHECK(big.max_abs_error < small.max_abs_error);
}

TEST_CASE("backend names") {
  CHECK(backend_from_string(to_string(Backend::kKl)) == Backend::kKl);
  CHECK(backend_from_string("direct") == Backend::kDirect);
  CHECK_THROWS_AS(backend_from_string("fft"), DomainError);
}
