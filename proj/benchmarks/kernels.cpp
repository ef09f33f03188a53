#include <benchmark/benchmark.h>

#include <hklab/harmonic.hpp>
#include <hklab/heatkernel.hpp>
#include <hklab/pathsim.hpp>

using namespace hklab;

static void BM_BuildGenerator(benchmark::State& state) {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  const auto w = centered_window(1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_generator(m, w));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(w.size()));
}
BENCHMARK(BM_BuildGenerator)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

static void BM_Uniformization(benchmark::State& state) {
  const auto g = build_generator(ConductanceModel::stable_like(1, 1.0), centered_window(1, 512));
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transition_density(g, t, {0}));
}
BENCHMARK(BM_Uniformization)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SamplerStep(benchmark::State& state) {
  const auto m = state.range(0) == 0 ? ConductanceModel::stable_like(1, 1.0)
                                     : ConductanceModel::stable_like(1, 1.0, WeightFunction::oscillating(0.5, 2.0));
  const JumpSampler sampler(m);
  RandomStream rng(1, 0);
  Point x{0};
  for (auto _ : state) {
    x = sampler.step(x, rng).target;
    if (std::abs(x[0]) > 1000000) x = Point{0};
  }
}
BENCHMARK(BM_SamplerStep)->Arg(0)->Arg(1);

static void BM_ExitTime(benchmark::State& state) {
  const auto m = ConductanceModel::stable_like(1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(expected_exit_time(m, {0}, {4, 8}, 10000, 3));
}
BENCHMARK(BM_ExitTime)->Unit(benchmark::kMillisecond);

static void BM_HarmonicSolve(benchmark::State& state) {
  const auto m = ConductanceModel::stable_like(1, 1.5);
  const double radius = static_cast<double>(state.range(0));
  const auto w = centered_window(1, required_half_width(m, radius));
  const auto p = make_problem(m, w, SetDescriptor::ball({0}, radius), boundary_preset(w, BoundaryPreset::FarSite, 2 * state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_harmonic(p));
}
BENCHMARK(BM_HarmonicSolve)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
