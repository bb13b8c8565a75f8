#include <benchmark/benchmark.h>

#include "eqtri/signal.hpp"

namespace eqtri {
namespace {

void BM_SimulateLink(benchmark::State& state) {
  const SignalParams sig = SignalParams{}.at_snr(10.0);
  const ZcSequence seq = zadoff_chu(sig.K, 1);
  const int length = frame_length(3.0, sig);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_link(seq, 2.0, sig, {0, 0}, length, rng));
}
BENCHMARK(BM_SimulateLink);

void BM_EstimateRange(benchmark::State& state) {
  const SignalParams sig = SignalParams{}.at_snr(10.0);
  const ZcSequence seq = zadoff_chu(sig.K, 1);
  Rng rng(2);
  const ReceivedFrame frame = simulate_link(seq, 2.0, sig, {0, 0}, frame_length(3.0, sig), rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_range(frame, seq, sig));
}
BENCHMARK(BM_EstimateRange);

}  // namespace
}  // namespace eqtri

BENCHMARK_MAIN();
