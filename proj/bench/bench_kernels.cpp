// Batch filter and scenario sweep: OpenMP kernels against their serial references.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pcbf/filter.hpp"
#include "pcbf/sim.hpp"

namespace {

std::vector<pcbf::SlabInstance> make_instances(std::size_t count)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  std::vector<pcbf::SlabInstance> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const int m = 1 + static_cast<int>(k % 3);
    out[k].slab.a = Eigen::VectorXd::NullaryExpr(m, [&] { return entry(rng); });
    out[k].u0 = Eigen::VectorXd::NullaryExpr(m, [&] { return entry(rng); });
    double l = entry(rng), u = entry(rng);
    if (l > u) { std::swap(l, u); }
    out[k].slab.lower = l;
    out[k].slab.upper = u;
  }
  return out;
}

std::vector<pcbf::ScenarioConfig> make_sweep(int count)
{
  std::vector<pcbf::ScenarioConfig> out;
  const auto x0s = pcbf::random_corridor_states(pcbf::SystemKind::DoubleIntegrator, count, 3);
  for (int i = 0; i < count; ++i) {
    pcbf::ScenarioConfig cfg;
    cfg.system = pcbf::SystemKind::DoubleIntegrator;
    cfg.filter = pcbf::FilterKind::ParallelPair;
    cfg.x0 = x0s[static_cast<std::size_t>(i)];
    cfg.nominal.kind = pcbf::NominalKind::RandomPiecewise;
    cfg.nominal.value = Eigen::VectorXd::Constant(1, 10.0);
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.horizon = 2.0;
    out.push_back(cfg);
  }
  return out;
}

void BM_SolveBatchSerial(benchmark::State & state)
{
  const auto in = make_instances(static_cast<std::size_t>(state.range(0)));
  std::vector<pcbf::FilterResult> out(in.size());
  for (auto _ : state) {
    pcbf::solve_batch_serial(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolveBatchParallel(benchmark::State & state)
{
  const auto in = make_instances(static_cast<std::size_t>(state.range(0)));
  std::vector<pcbf::FilterResult> out(in.size());
  for (auto _ : state) {
    pcbf::solve_batch(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State & state)
{
  const auto cfgs = make_sweep(static_cast<int>(state.range(0)));
  for (auto _ : state) { benchmark::DoNotOptimize(pcbf::run_sweep_serial(cfgs)); }
}

void BM_SweepParallel(benchmark::State & state)
{
  const auto cfgs = make_sweep(static_cast<int>(state.range(0)));
  for (auto _ : state) { benchmark::DoNotOptimize(pcbf::run_sweep(cfgs, 0)); }
}

}  // namespace

BENCHMARK(BM_SolveBatchSerial)->Arg(10000)->Arg(100000);
BENCHMARK(BM_SolveBatchParallel)->Arg(10000)->Arg(100000);
BENCHMARK(BM_SweepSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
