#include "doctest.h"

#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>

#include "spherefield/chung.hpp"
#include "spherefield/errors.hpp"
#include "spherefield/smallball.hpp"

using namespace spherefield;

TEST_CASE("p exponent") {
  CHECK(p_exponent(3.0, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(p_exponent(3.5, 1.2) == doctest::Approx(0.23076923076923).epsilon(1e-12));
  CHECK_THROWS_AS(p_exponent(2.9, 1.0), DomainError);
  CHECK_THROWS_AS(p_exponent(3.0, 2.0), DomainError);
  // approach alpha -> 2 + beta from inside: finite and continuous
  const double beta = 0.8;
  double prev = p_exponent(2.0 + beta + 1e-2, beta);
  for (double d = 5e-3; d > 1e-8; d /= 2) {
    const double v = p_exponent(2.0 + beta + d, beta);
    CHECK(std::isfinite(v));
    CHECK(std::abs(v - prev) < 1e-2);
    prev = v;
  }
  // 0 < p < min(beta/2, (alpha-2)/4) over the admissible region
  for (int i = 1; i <= 20; ++i) {
    const double b = 2.0 * i / 21.0;
    for (int j = 1; j <= 20; ++j) {
      const double a = 2.0 + b + (2.0 - b) * j / 21.0;
      const double p = p_exponent(a, b);
      CHECK(p > 0.0);
      CHECK(p < std::min(b / 2.0, (a - 2.0) / 4.0));
    }
  }
}

TEST_CASE("phi and psi") {
  const auto rp = RateParams::from(3.0, 1.0);
  const double e = std::numbers::e;
  CHECK(phi_rate(rp, std::exp(-e)) == doctest::Approx(std::pow(std::exp(3.0 * e), rp.p)).epsilon(1e-12));
  CHECK(phi_rate(rp, 0.01) == doctest::Approx(std::pow(std::log(std::log(100.0)) / 1e-6, 1.0 / 6.0)).epsilon(1e-12));
  double prev = 0.0;
  for (int n = 2; n < 30; ++n) {
    const double v = phi_rate(rp, std::pow(2.0, -n));
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(phi_rate(rp, 0.5), DomainError);
  CHECK(psi_rate(rp, 1.0, 1.0) == 1.0);
  CHECK(psi_rate(rp, 0.5, 0.5) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(psi_rate(rp, 0.2, 0.37) / psi_rate(rp, 0.1, 0.37) == doctest::Approx(8.0).epsilon(1e-14));
  for (double r : {0.3, 0.01, 1e-5}) {
    CHECK(std::abs(std::pow(phi_rate(rp, r), 1.0 / rp.p) * r * r * r / std::log(std::abs(std::log(r))) - 1.0) <= 1e-12);
  }
  // psi matches the inline formula exactly
  const double r = 0.3, eps = 0.41;
  CHECK(psi_rate(rp, r, eps) == r * r * r * std::pow(eps, -1.0 / rp.p));
}

TEST_CASE("ladder mesh") {
  CHECK(ladder_offset(1.5) == 2);
  CHECK(ladder_offset(4.0) == 0);
  const SpacetimePoint c{{0, 0, 1}, 0.0};
  const auto lm = ladder_mesh(c, 1.5, 8, 4, 4);
  CHECK(lm.radii.front() <= 0.3);
  CHECK(lm.radii.size() == 8);
  CHECK(lm.points.size() == 1 + 8 * 64);
  CHECK_THROWS_AS(ladder_mesh(c, 1.5, 30, 2, 2), DomainError);
}

TEST_CASE("liminf traces") {
  const CovarianceModel m(SpectrumParams::make(3.0, 1.0), 200);
  const SpacetimePoint c{{0, 0, 1}, 0.0};
  const auto traces = empirical_liminf(m, c, 1.5, 6, 4, 4, {1, 2, 3});
  REQUIRE(traces.size() == 3);
  for (const auto& t : traces) {
    CHECK_FALSE(t.has_zero);
    for (std::size_t n = 0; n < t.values.size(); ++n) {
      CHECK(t.values[n] > 0.0);
      if (n > 0) {
        CHECK(t.m_hat[n] <= t.m_hat[n - 1]);
        CHECK(t.running_min[n] <= t.running_min[n - 1]);
      }
    }
  }
  const auto again = empirical_liminf(m, c, 1.5, 6, 4, 4, {2});
  CHECK(again[0].values == traces[1].values);
}

TEST_CASE("band decomposition") {
  const auto p = SpectrumParams::make(3.0, 1.0);
  const CovarianceModel m(p, 40);
  std::vector<SpacetimePoint> pts;
  for (int i = 0; i < 6; ++i) pts.push_back({direction_from_angles(0.2 + 0.4 * i, 1.1 * i), 0.1 * (i % 3)});
  const auto b = band_decomposition(m, 20, pts, 8);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(b.low[i] + b.high[i] == b.full[i]);
  CHECK_THROWS_AS(band_decomposition(m, 40, pts, 8), DomainError);
  CHECK_THROWS_AS(band_decomposition(m, 0, pts, 8), DomainError);

  // tail via polygamma: sum_{l=a}^inf l^-2 = psi1(a), sum l^-3 = -psi2(a)/2
  auto tail = [](int a) { return 2.0 * boost::math::trigamma(a) - 0.5 * boost::math::polygamma(2, a); };
  const CovarianceModel big(p, 200);
  const double oracle = (tail(101) - tail(201)) / (4.0 * std::numbers::pi);
  CHECK(std::abs(high_band_variance(big, 100) - oracle) <= 1e-10);

  const auto chk = band_independence_check(m, 20, pts, 4000, 5);
  CHECK(chk.exact_reconstruction);
  CHECK(chk.max_cross_se_units <= 5.0);
  CHECK(chk.high_band.max_se_units <= 5.0);
}

TEST_CASE("low band alone has smaller maxima") {
  // removing the high band shrinks the field: the low-band small-ball
  // probability is at least the full-field one, up to CI noise
  const auto p = SpectrumParams::make(3.0, 1.0);
  const CovarianceModel full(p, 60);
  const CovarianceModel low(p, 15);
  const SpacetimePoint c{{0, 0, 1}, 0.0};
  const auto eps = eps_ladder(1.0, 0.1, 8);
  const auto cf = estimate_small_ball(full, c, 0.3, eps, 3000, 4, 4, 9);
  const auto cl = estimate_small_ball(low, c, 0.3, eps, 3000, 4, 4, 9);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CHECK(cl.p_hat[i] + 2.0 * (cl.ci_half_width[i] + cf.ci_half_width[i]) >= cf.p_hat[i]);
  }
}
