#include <benchmark/benchmark.h>

#include <vector>

#include "fracspde/kernel.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/simulator.hpp"
#include "fracspde/spectral.hpp"

using namespace fracspde;

namespace {

ModeSpectrum rectangle_spectrum(std::size_t M) {
  const SpdeParams p = to_spde(RangeParams{1.0, 1.0, 0.1, 5.0, 0.5, 1.0}, 2);
  return mu_lambda(p, eigen_rectangle(2, M));
}

void BM_SigmaMatrix(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double mu = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma_matrix(mu, 0.5, 0.5 + 0x1p-10, m));
    mu = mu < 1e3 ? mu * 1.7 : 0.1;
  }
}
BENCHMARK(BM_SigmaMatrix)->DenseRange(0, 3);

void BM_ProjectionKernel(benchmark::State& state) {
  const auto mesh = TemporalMesh::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_quadrature_poly(0.75, mesh, mesh.intervals(), Projection{1}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectionKernel)->RangeMultiplier(4)->Range(64, 4096);

void BM_SampleNoise(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto mesh = TemporalMesh::uniform(1.0, 128);
  const auto spec = rectangle_spectrum(M);
  const NoiseSampler sampler(mesh, spec.mu, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(++seed));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(M * 128));
}
BENCHMARK(BM_SampleNoise)->RangeMultiplier(4)->Range(16, 1024);

void BM_SimulatePaths(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto mesh = TemporalMesh::uniform(1.0, 256);
  const auto spec = rectangle_spectrum(M);
  std::vector<double> times;
  for (int i = 1; i <= 8; ++i) times.push_back(i / 8.0);
  const PathSimulator sim(1.5, spec, mesh, Projection{1}, times);
  const auto noise = sample_block(mesh, spec.mu, 1, 1);
  std::vector<double> out(M * times.size());
  for (auto _ : state) {
    sim.evaluate(noise, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(M));
}
BENCHMARK(BM_SimulatePaths)->RangeMultiplier(4)->Range(16, 1024);

}  // namespace

BENCHMARK_MAIN();
