// Serial reference sweep against the OpenMP sweep on the same workload.
//
//   bench_sweep --benchmark_filter=parallel

#include <benchmark/benchmark.h>

#include "equalab/harness.hpp"

using namespace equalab;

namespace {

SweepConfig workload(std::size_t lf) {
  SweepConfig cfg;
  cfg.snr_db = {10.0, 14.0};
  cfg.detectors = parse_detector_list("amldfbe,mlse", {lf});
  cfg.channel_est = ChannelEstimation::Ls;
  cfg.trials_max = 64;
  cfg.min_bit_errors = UINT64_MAX;
  cfg.timing = false;
  return cfg;
}

void set_counters(benchmark::State& state, const SweepConfig& cfg) {
  const double frames = static_cast<double>(cfg.trials_max * cfg.snr_db.size());
  state.counters["frames/s"] = benchmark::Counter(frames, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_sweep_serial(benchmark::State& state) {
  const SweepConfig cfg = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(cfg));
  set_counters(state, cfg);
}

void BM_sweep_parallel(benchmark::State& state) {
  SweepConfig cfg = workload(static_cast<std::size_t>(state.range(0)));
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
  set_counters(state, cfg);
}

}  // namespace

BENCHMARK(BM_sweep_serial)->ArgNames({"lf"})->Args({5})->Args({10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)
    ->ArgNames({"lf", "threads"})
    ->ArgsProduct({{5, 10}, {1, 2, 4, 0}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
