#include <benchmark/benchmark.h>

#include "eqtri/manifold.hpp"

#include <random>

namespace eqtri {
namespace {

constexpr double kSide = 0.1;

Mat3 gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 9; ++i) m(i) = n(rng);
  return m;
}

void BM_TangentProject(benchmark::State& state) {
  Rng rng(1);
  const TrianglePoint x = random_point(kSide, rng);
  const Mat3 z = gaussian(rng);
  for (auto _ : state) benchmark::DoNotOptimize(tangent_project(x, z));
}
BENCHMARK(BM_TangentProject);

void BM_Retract(benchmark::State& state) {
  Rng rng(2);
  const TrianglePoint x = random_point(kSide, rng);
  const TangentVector xi = 0.01 * kSide * tangent_project(x, gaussian(rng)).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(retract(x, xi));
}
BENCHMARK(BM_Retract);

void BM_RiemannianHessian(benchmark::State& state) {
  Rng rng(3);
  const TrianglePoint x = random_point(kSide, rng);
  const Mat3 egrad = gaussian(rng);
  const Mat3 ehess = gaussian(rng);
  const TangentVector xi = tangent_project(x, gaussian(rng));
  for (auto _ : state) benchmark::DoNotOptimize(riemannian_hessian(x, egrad, ehess, xi));
}
BENCHMARK(BM_RiemannianHessian);

}  // namespace
}  // namespace eqtri

BENCHMARK_MAIN();
