#include <benchmark/benchmark.h>

#include "sinebeta/estimators.hpp"
#include "sinebeta/noise.hpp"
#include "sinebeta/sde.hpp"
#include "sinebeta/specialfn.hpp"

using namespace sinebeta;

static void BM_EllipticK(benchmark::State& state) {
  double m = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specialfn::elliptic_k(m));
    m = m < -1e6 ? -1.0 : m * 1.01;
  }
}
BENCHMARK(BM_EllipticK);

static void BM_KInverse(benchmark::State& state) {
  double x = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specialfn::k_inverse(x));
    x = x > 1.5 ? 1e-4 : x * 1.1;
  }
}
BENCHMARK(BM_KInverse);

static void BM_LambertW(benchmark::State& state) {
  double z = -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specialfn::lambert_w_lower(z));
    z = z > -1e-200 ? -0.3 : z * 0.5;
  }
}
BENCHMARK(BM_LambertW);

static void BM_Gaussian(benchmark::State& state) {
  NoiseStream noise(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(noise.gaussian());
}
BENCHMARK(BM_Gaussian);

// One AlphaDecaying counting path at lambda = 2 pi; reports steps per second.
static void BM_AlphaPath(benchmark::State& state) {
  sde::SimConfig cfg;
  cfg.step = sde::SimConfig::default_step(2 * specialfn::kPi);
  cfg.t_max = 5.0;
  std::uint64_t i = 0;
  for (auto _ : state) {
    NoiseStream noise(2, i++);
    benchmark::DoNotOptimize(estimators::sample_counting(2 * specialfn::kPi, 2.0, cfg, noise));
  }
  state.counters["steps"] =
      benchmark::Counter(static_cast<double>(state.iterations()) * cfg.t_max / cfg.step,
                         benchmark::Counter::kIsRate);
}
BENCHMARK(BM_AlphaPath)->Unit(benchmark::kMillisecond);

static void BM_XTilted(benchmark::State& state) {
  sde::SimConfig cfg;
  std::uint64_t i = 0;
  for (auto _ : state) {
    NoiseStream noise(3, i++);
    benchmark::DoNotOptimize(sde::simulate_x_tilted({2.0, 0.0, 0.0}, 5.0, cfg, noise));
  }
}
BENCHMARK(BM_XTilted)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
