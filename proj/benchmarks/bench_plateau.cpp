#include <benchmark/benchmark.h>

#include "gardingkit/plateau.hpp"

namespace plateau = gk::plateau;

namespace {

plateau::SolverConfig config(int grid) {
  plateau::SolverConfig cfg;
  cfg.n = 6;
  cfg.k = 3;
  cfg.sigma = 0.125;
  cfg.grid = grid;
  return cfg;
}

std::vector<double> cap_profile(const plateau::SolverConfig& cfg, double eps) {
  const plateau::Cap cap = plateau::cap_through(cfg.k, cfg.sigma, cfg.R, eps);
  std::vector<double> u(static_cast<std::size_t>(cfg.grid) + 1);
  for (int i = 0; i <= cfg.grid; ++i)
    u[static_cast<std::size_t>(i)] = cap.u(cfg.R * i / cfg.grid);
  return u;
}

}  // namespace

static void bm_residual(benchmark::State& state) {
  const auto cfg = config(static_cast<int>(state.range(0)));
  const auto u = cap_profile(cfg, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(plateau::residual(u, cfg, 0.1));
  state.SetItemsProcessed(state.iterations() * cfg.grid);
}
BENCHMARK(bm_residual)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMicrosecond);

static void bm_jacobian_column(benchmark::State& state) {
  const auto cfg = config(1024);
  const auto u = cap_profile(cfg, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(plateau::jacobian_column(u, cfg, 0.1, 512));
  state.SetLabel("full assembly behind one column");
}
BENCHMARK(bm_jacobian_column)->Unit(benchmark::kMillisecond);

static void bm_solve_schedule(benchmark::State& state) {
  auto cfg = config(static_cast<int>(state.range(0)));
  cfg.eps_schedule = {0.2, 0.1};
  for (auto _ : state) {
    const auto outcome = plateau::solve(cfg);
    benchmark::DoNotOptimize(outcome.all_converged);
  }
}
BENCHMARK(bm_solve_schedule)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
