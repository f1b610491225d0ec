#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <random>

#include "lipgrad/characteristic.hpp"
#include "lipgrad/direct.hpp"
#include "lipgrad/gkls.hpp"
#include "lipgrad/smoothd.hpp"

using namespace lipgrad;

static void BM_Characteristic(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 5>> data(1024);
  for (auto& d : data) d = {u(rng), u(rng), u(rng), u(rng), 0.1 + std::abs(u(rng))};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& d = data[i++ & 1023];
    const double m = estimate_m(interval_w(d[0], d[1], d[2], d[3], d[4]), 1.5, 1e-6);
    benchmark::DoNotOptimize(characteristic_R(d[0], d[1], d[2], d[3], d[4], m));
  }
}
BENCHMARK(BM_Characteristic);

static void BM_GklsEvaluate(benchmark::State& state) {
  const auto f = gkls::generate_function(gkls::standard_class(static_cast<int>(state.range(0))), 1);
  std::vector<double> x(f.dimension(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(f.evaluate(x));
}
BENCHMARK(BM_GklsEvaluate)->Arg(1)->Arg(8);

static void BM_SmoothDRun(benchmark::State& state) {
  const auto f = gkls::generate_function(gkls::standard_class(1), 1);
  const Problem p = f.as_problem();
  SolverConfig cfg;
  cfg.r_bar = 2.0;
  cfg.eps = 0.0;
  cfg.max_trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, cfg).incumbent_value);
}
BENCHMARK(BM_SmoothDRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_DirectRun(benchmark::State& state) {
  const auto f = gkls::generate_function(gkls::standard_class(1), 1);
  const Problem p = f.as_problem();
  direct::DirectConfig cfg;
  cfg.keep_log = false;
  cfg.max_trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(direct::run_direct(p, cfg).incumbent_value);
}
BENCHMARK(BM_DirectRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
