#include <benchmark/benchmark.h>

#include "gardingkit/cones.hpp"
#include "gardingkit/lemmas.hpp"
#include "gardingkit/symfun.hpp"

namespace cones = gk::cones;
namespace lemmas = gk::lemmas;

namespace {

gk::CurvatureVector gamma_point(int n, int k, long index) {
  cones::SampleSpec spec;
  spec.n = n;
  spec.k = k;
  spec.seed = 7;
  return cones::sample_one(spec, index);
}

}  // namespace

static void bm_quotient_concavity_trial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = n / 2;
  lemmas::CheckConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.trials = 64;
  cfg.refine = false;
  for (auto _ : state) benchmark::DoNotOptimize(lemmas::check_quotient_concavity(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(bm_quotient_concavity_trial)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void bm_hs_recursion_sides(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = 2;
  const auto kappa = gamma_point(n, k + 1, 3);
  gk::Rng rng(5);
  const auto xi = cones::random_unit_direction(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(lemmas::hs_recursion_sides(kappa, xi, k));
}
BENCHMARK(bm_hs_recursion_sides)->Arg(4)->Arg(6)->Arg(8);

static void bm_adversarial_refine(benchmark::State& state) {
  const auto kappa = gamma_point(6, 3, 11);
  gk::Rng dir_rng(9);
  const auto xi = cones::random_unit_direction(dir_rng, 6);
  const auto objective = [](const gk::CurvatureVector& kv, const gk::DirectionVector&) {
    const auto b = gk::sym::build_bundle(kv);
    return -(b.dsigma(3, 0) * kv[0] - 0.5 * b.sigma(3));
  };
  const auto admissible = [](const gk::CurvatureVector& kv) {
    return gk::sym::in_gamma_k_values(kv.values(), 3);
  };
  for (auto _ : state) {
    gk::Rng rng(17);
    cones::RefineOptions opt;
    opt.sweeps = 2;
    opt.restarts = 1;
    benchmark::DoNotOptimize(
        cones::adversarial_refine(kappa, xi, objective, admissible, rng, opt));
  }
}
BENCHMARK(bm_adversarial_refine);

static void bm_interior_sampler(benchmark::State& state) {
  cones::SampleSpec spec;
  spec.n = static_cast<int>(state.range(0));
  spec.k = spec.n - 2;
  spec.seed = 42;
  long index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cones::sample_one(spec, index++));
}
BENCHMARK(bm_interior_sampler)->Arg(4)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
