#include <random>

#include <benchmark/benchmark.h>

#include "invp/interval_cover.hpp"
#include "invp/inverse_pressure.hpp"
#include "invp/pressure.hpp"
#include "invp/zoo.hpp"

using namespace invp;

static void BM_PressureExact(benchmark::State& state) {
  const auto sys = iterate_system(zoo::m1(), static_cast<std::size_t>(state.range(0)));
  const auto phi = Potential::depth1(stable_potential(sys));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pressure_exact(sys.transitions(), phi, 0.63, 0.0).value);
  }
  state.SetLabel(std::to_string(sys.alphabet_size()) + " symbols");
}
BENCHMARK(BM_PressureExact)->Arg(1)->Arg(2)->Arg(3);

static void BM_MinWeightCover(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  const double len = 4.0 / static_cast<double>(n);
  std::vector<CoverCandidate> cands;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = u(rng) * (1.0 - len);
    cands.push_back({{lo, lo + len}, 0.5 + u(rng)});
  }
  cands.push_back({{0.0, 1.0}, 1e9});
  const std::vector<Interval> target{{0.0, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(min_weight_cover(target, cands).total_weight);
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_MinWeightCover)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

// Cold: geometry rebuilt per call. Warm: the engine reuses cached covers.
static void BM_QmMinusCold(benchmark::State& state) {
  const auto sys = zoo::s2();
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Q_m_minus(sys, LinearPotential::stable(0.5), m, 1.0 / 16.0).log_value);
  }
}
BENCHMARK(BM_QmMinusCold)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_QmMinusWarm(benchmark::State& state) {
  const auto sys = zoo::s2();
  const auto m = static_cast<std::size_t>(state.range(0));
  InversePressureEngine engine(sys, 1.0 / 16.0);
  engine.q_m_minus(LinearPotential::stable(0.0), m);
  double t = 0.0;
  for (auto _ : state) {
    t = t > 1.0 ? 0.0 : t + 0.01;
    benchmark::DoNotOptimize(engine.q_m_minus(LinearPotential::stable(t), m).log_value);
  }
}
BENCHMARK(BM_QmMinusWarm)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
