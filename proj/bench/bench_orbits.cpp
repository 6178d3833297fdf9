#include <benchmark/benchmark.h>

#include "invis/ergodic.hpp"

namespace {

const invis::SkewSystem& bernoulli_system() {
  static const invis::SkewSystem sys = invis::SkewSystem::bernoulli(invis::build_family(10));
  return sys;
}

const invis::SkewSystem& solenoid_system() {
  static const invis::SkewSystem sys = invis::SkewSystem::solenoid(invis::build_family(10));
  return sys;
}

invis::SimulationConfig config(std::int64_t steps) {
  invis::SimulationConfig c;
  c.steps = static_cast<std::uint64_t>(steps);
  c.burn_in = 1000;
  return c;
}

void BM_BernoulliReference(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(invis::simulate_reference(bernoulli_system(), config(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BernoulliKernel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(invis::simulate(bernoulli_system(), config(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolenoidReference(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(invis::simulate_reference(solenoid_system(), config(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolenoidKernel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(invis::simulate(solenoid_system(), config(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BernoulliReference)->Arg(1 << 22)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BernoulliKernel)->Arg(1 << 22)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolenoidReference)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolenoidKernel)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
