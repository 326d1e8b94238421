#include <benchmark/benchmark.h>

#include "app_panel.hpp"
#include "policybound/bounds.hpp"
#include "policybound/estimands.hpp"
#include "policybound/normal.hpp"
#include "policybound/panel.hpp"
#include "policybound/quadrature.hpp"
#include "policybound/sim.hpp"

using namespace policybound;

static void BM_DrawDataset(benchmark::State& state) {
  const DgpParams params = DgpParams::simulation();
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    SimDataset ds = draw_dataset(params, n, seed++);
    benchmark::DoNotOptimize(ds.latent.data());
  }
}
BENCHMARK(BM_DrawDataset)->Arg(15)->Arg(50)->Arg(500);

static void BM_ReplicationPipeline(benchmark::State& state) {
  // One full replication: accepted draw, then all five estimator
  // evaluations.
  const DgpParams params = DgpParams::simulation();
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    SimDataset ds = draw_dataset(params, n, seed++);
    while (!accept_dataset(ds)) {
      ds = draw_dataset(params, n, seed++);
    }
    long long total = 0;
    for (SimEstimator e : kSimEstimators) {
      const ArmEval eval = evaluate_intervals(ds, estimator_intervals(ds, e));
      total += eval.treated.covered + eval.control.covered;
    }
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_ReplicationPipeline)->Arg(15)->Arg(50);

static void BM_RobustnessGrid(benchmark::State& state) {
  const Panel panel = build_application_panel();
  const std::vector<std::string> history = {"pdmp_2013", "pdmp_2014"};
  for (auto _ : state) {
    RobustnessGrid grid = robustness_grid(panel, 2.0, history);
    benchmark::DoNotOptimize(grid.rows.data());
  }
}
BENCHMARK(BM_RobustnessGrid);

static void BM_GaussHermite(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    GaussHermite rule = gauss_hermite(nodes);
    benchmark::DoNotOptimize(rule.nodes.data());
  }
}
BENCHMARK(BM_GaussHermite)->Arg(64)->Arg(128);

static void BM_ProjectionOracle(benchmark::State& state) {
  const DgpParams params = DgpParams::simulation();
  for (auto _ : state) {
    LinearProjection line = projection_oracle(params, MixtureKind::cate);
    benchmark::DoNotOptimize(line.slope);
  }
}
BENCHMARK(BM_ProjectionOracle);

static void BM_NormQuantile(benchmark::State& state) {
  double p = 0.0001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(norm_quantile(p));
    p += 0.0001;
    if (p >= 1.0) {
      p = 0.0001;
    }
  }
}
BENCHMARK(BM_NormQuantile);

BENCHMARK_MAIN();
