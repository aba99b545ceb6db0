#include <benchmark/benchmark.h>

#include <random>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/classify_fit.hpp"
#include "wulfflab/hypersurface.hpp"

using namespace wulfflab;

namespace {

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Vec u(d);
  for (int i = 0; i < d; ++i) u[i] = g(rng);
  return u.normalized();
}

void BM_Evaluate(benchmark::State& state) {
  const auto f = anisotropy_by_name(state.range(0) == 0 ? "quadratic" : "axisymmetric", 3);
  std::mt19937_64 rng(1);
  const Vec u = random_unit(rng, 3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f, u));
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1);

void BM_Curvatures(benchmark::State& state) {
  const auto f = anisotropy_by_name("axisymmetric", 3);
  const ImmersionPatch h = helicoid_patch(2.0);
  Vec p(2);
  p << 0.3, 0.7;
  for (auto _ : state) benchmark::DoNotOptimize(anisotropic_curvatures(f, h, p));
}
BENCHMARK(BM_Curvatures);

void BM_DualNorm(benchmark::State& state) {
  const auto f = anisotropy_by_name("axisymmetric", 3);
  std::mt19937_64 rng(2);
  const Vec y = 1.7 * random_unit(rng, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dual_norm(f, y));
}
BENCHMARK(BM_DualNorm);

void BM_FitHelicoid(benchmark::State& state) {
  const ImmersionPatch h = helicoid_patch(2.0);
  const auto grid = h.grid(7);
  FitOptions opt;
  opt.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_anisotropy(h, static_cast<int>(state.range(0)), grid, opt));
}
BENCHMARK(BM_FitHelicoid)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
