#include <benchmark/benchmark.h>

#include "eqtri/sim.hpp"

namespace eqtri {
namespace {

// One noisy reference trial at 10 dB, solved repeatedly with solver state.range(0).
void BM_Solve(benchmark::State& state) {
  Scenario sc = Scenario::reference();
  sc.direct_noise_scale = 1.0;
  const SolverId solver = kAllSolvers[state.range(0)];
  Rng rng = substream(sc.seed, 0, 0, 0);
  const MeasurementSet meas(sc.beacons, draw_ranges(sc, 10.0, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_measurements(sc, meas, 10.0, solver, substream(sc.seed, 0, 0, 1)));
  }
  state.SetLabel(std::string(to_string(solver)));
}
BENCHMARK(BM_Solve)->DenseRange(0, 4);

void BM_FisherBundle(benchmark::State& state) {
  const Scenario sc = Scenario::reference();
  const SignalParams sig = sc.sig.at_snr(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(fisher_bundle(sc.truth, sc.beacons, sig));
}
BENCHMARK(BM_FisherBundle);

}  // namespace
}  // namespace eqtri

BENCHMARK_MAIN();
