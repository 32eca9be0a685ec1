// Serial versus OpenMP frame batches, and the fused pixel sampler versus the
// literal source -> loss -> background composition.
//
//   ./qisim_bench --benchmark_filter=Batch

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qisim/kernels.hpp"
#include "qisim/sampling.hpp"

namespace {

qisim::FrameSetup default_setup() {
  qisim::FrameSetup setup;
  setup.bg = {1300, 1000.0};
  return setup;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto setup = default_setup();
  const auto frames = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qisim::simulate_batch_serial(setup, 0, frames));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchSerial)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
  const auto setup = default_setup();
  const auto frames = static_cast<std::size_t>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(qisim::simulate_batch_parallel(setup, 0, frames));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}
BENCHMARK(BM_BatchParallel)
    ->ArgsProduct({{256, 4096}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_FrameFused(benchmark::State& state) {
  auto setup = default_setup();
  setup.src.modes_m = state.range(0);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qisim::simulate_frame_stats(setup, i++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(setup.n_pix));
}
BENCHMARK(BM_FrameFused)->Arg(900)->Arg(90000)->Arg(9000000);

void BM_FrameLiteral(benchmark::State& state) {
  auto setup = default_setup();
  setup.src.modes_m = state.range(0);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qisim::simulate_frame(setup, i++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(setup.n_pix));
}
BENCHMARK(BM_FrameLiteral)->Arg(900)->Arg(90000)->Arg(9000000);

void BM_Poisson(benchmark::State& state) {
  qisim::CounterRng rng(1);
  const double mean = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qisim::sample_poisson(rng, mean));
}
BENCHMARK(BM_Poisson)->Arg(3)->Arg(30)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
