#include <benchmark/benchmark.h>

#include "gardingkit/rng.hpp"
#include "gardingkit/symfun.hpp"

namespace sym = gk::sym;

namespace {

gk::CurvatureVector random_gamma_point(int n, int k, std::uint64_t seed) {
  gk::Rng rng(seed);
  while (true) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform(-1.0, 3.0);
    std::sort(v.begin(), v.end(), std::greater<double>());
    if (sym::in_gamma_k_values(v, k)) return gk::CurvatureVector(std::move(v), true);
  }
}

}  // namespace

static void bm_build_bundle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto kappa = random_gamma_point(n, std::min(3, n), 7);
  for (auto _ : state) benchmark::DoNotOptimize(sym::build_bundle(kappa));
}
BENCHMARK(bm_build_bundle)->Arg(4)->Arg(6)->Arg(8)->Arg(12);

static void bm_dir_hess_quotient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = std::min(3, n - 1);
  const auto kappa = random_gamma_point(n, k, 11);
  const auto bundle = sym::build_bundle(kappa);
  std::vector<double> xi(static_cast<std::size_t>(n), 1.0);
  xi[0] = -1.0;
  const gk::DirectionVector dir(xi);
  for (auto _ : state)
    benchmark::DoNotOptimize(sym::dir_hess(sym::Form::quotient, k, bundle, dir));
}
BENCHMARK(bm_dir_hess_quotient)->Arg(4)->Arg(6)->Arg(8);

static void bm_hs_q2_residual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto kappa = random_gamma_point(n, 2, 13);
  const auto bundle = sym::build_bundle(kappa);
  std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
  xi[0] = 1.0;
  const gk::DirectionVector dir(xi);
  for (auto _ : state) benchmark::DoNotOptimize(sym::hs_q2_residual(bundle, dir));
}
BENCHMARK(bm_hs_q2_residual)->Arg(4)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
