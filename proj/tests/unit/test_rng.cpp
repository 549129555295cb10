#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "spherefield/rng.hpp"

using namespace spherefield;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 distribution (kat_vectors).
  const auto zero = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  CHECK(zero == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const std::uint32_t f = 0xffffffffu;
  const auto ones = Philox4x32::apply({f, f, f, f}, {f, f});
  CHECK(ones == Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("streams are reproducible and disjoint") {
  StreamRng a(42, StreamDomain::kKlCoefficients, 3, 7);
  StreamRng b(42, StreamDomain::kKlCoefficients, 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

  std::set<double> seen;
  for (std::uint32_t lo = 0; lo < 50; ++lo) {
    StreamRng r(42, StreamDomain::kKlCoefficients, 0, lo);
    for (int i = 0; i < 20; ++i) seen.insert(r.uniform());
  }
  CHECK(seen.size() == 1000);

  StreamRng c(42, StreamDomain::kDirectSampler, 3, 7);
  StreamRng d(42, StreamDomain::kKlCoefficients, 3, 7);
  CHECK(c.uniform() != d.uniform());
}

TEST_CASE("uniform and normal moments") {
  StreamRng r(7, StreamDomain::kSweep, 0, 0);
  const int n = 200000;
  double su = 0.0, s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
  }
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("fill_normal matches sequential draws") {
  StreamRng a(1, StreamDomain::kVolumeMc, 0, 0);
  StreamRng b(1, StreamDomain::kVolumeMc, 0, 0);
  std::vector<double> v(11);
  a.fill_normal(v);
  for (double x : v) CHECK(x == b.normal());
}
