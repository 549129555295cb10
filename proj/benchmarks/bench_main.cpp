#include <benchmark/benchmark.h>

#include <cmath>

#include "spherefield/analytic.hpp"
#include "spherefield/geometry.hpp"
#include "spherefield/harmonics.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/linalg.hpp"
#include "spherefield/smallball.hpp"
#include "spherefield/spectrum.hpp"
#include "spherefield/synthesis.hpp"

using namespace spherefield;

namespace {

const SpectrumParams kParams = SpectrumParams::make(3.0, 1.0);

void BM_LegendreBatch(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(legendre_batch(ell, 0.37));
}
BENCHMARK(BM_LegendreBatch)->Arg(100)->Arg(1000)->Arg(10000);

void BM_OneMinusLegendre(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(one_minus_legendre_cos(ell, 1e-3));
}
BENCHMARK(BM_OneMinusLegendre)->Arg(1000)->Arg(10000);

void BM_SphHarmAll(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const Vec3 dir = direction_from_angles(0.8, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(real_sph_harm_all(ell, dir));
}
BENCHMARK(BM_SphHarmAll)->Arg(30)->Arg(100)->Arg(400);

void BM_GammaCov(benchmark::State& state) {
  const CovarianceModel model(kParams, static_cast<int>(state.range(0)));
  double eta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_cov(model, eta, 0.2));
    eta = std::fmod(eta + 0.013, 1.0);
  }
}
BENCHMARK(BM_GammaCov)->Arg(400)->Arg(10000);

void BM_KlSample(benchmark::State& state) {
  const CovarianceModel model(kParams, static_cast<int>(state.range(0)));
  std::vector<Vec3> dirs;
  for (int i = 0; i < 50; ++i) dirs.push_back(direction_from_angles(0.02 * i, 0.5 * i));
  const KlSynthesizer kl(model, lattice(dirs, TimeGrid::make({0.0, 0.1, 0.2, 0.3})));
  std::uint64_t draw = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kl.sample(1, draw++));
}
BENCHMARK(BM_KlSample)->Arg(30)->Arg(100);

void BM_FactorizePsd(benchmark::State& state) {
  const CovarianceModel model(kParams, 200);
  const auto mesh = ball_mesh(SpacetimePoint{}, 0.3, static_cast<int>(state.range(0)), 8);
  const auto gram = gram_matrix(model, mesh.points);
  for (auto _ : state) benchmark::DoNotOptimize(factorize_psd(gram));
}
BENCHMARK(BM_FactorizePsd)->Arg(4)->Arg(8);

void BM_BallMaxima(benchmark::State& state) {
  const CovarianceModel model(kParams, 200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_maxima(model, SpacetimePoint{}, 0.3, 8, 8, state.range(0), 3));
  }
}
BENCHMARK(BM_BallMaxima)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_IntegralBound(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(integral_bound_check(0.7, 0.5, 1e-3));
}
BENCHMARK(BM_IntegralBound);

void BM_VolumeMc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mu_ball_volume_mc(kParams, 0.1, 100000, 5));
}
BENCHMARK(BM_VolumeMc)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
