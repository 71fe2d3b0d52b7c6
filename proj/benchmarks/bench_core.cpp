#include <benchmark/benchmark.h>

#include "nanoshuttle/analysis.hpp"
#include "nanoshuttle/spectrum.hpp"
#include "nanoshuttle/transport.hpp"

using namespace nanoshuttle;

static void BM_EnumerateLevels(benchmark::State& state) {
  const double cutoff = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_levels(BoxGeometry{}, cutoff));
  }
}
BENCHMARK(BM_EnumerateLevels)->Arg(950)->Arg(5000)->Arg(20000);

static SweepConfig forward_sweep(double step) {
  SweepConfig s;
  s.v_start = 0.0;
  s.v_end = 1.0;
  s.step = step;
  s.seed = 1;
  return s;
}

static void BM_SimulateDrainSweep(benchmark::State& state) {
  const DeviceModel m = DeviceModel::defaults();
  const SweepConfig s = forward_sweep(1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_drain_sweep(m, s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDrainSweep)->Arg(1000)->Arg(10000);

static void BM_DetectPeaks(benchmark::State& state) {
  DeviceModel m = DeviceModel::defaults();
  m.noise_enabled = false;
  const IVTrace t =
      simulate_drain_sweep(m, forward_sweep(1.0 / static_cast<double>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_peaks(t));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectPeaks)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
