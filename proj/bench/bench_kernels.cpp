// Serial reference vs OpenMP kernels on the sweep workloads.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qmod/kernels.h"
#include "qmod/sim_kernel.h"

namespace {

using namespace qmod;

std::vector<ScalingParams> random_draws(std::size_t count) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<ScalingParams> draws(count);
  for (auto& p : draws) {
    p.gamma = 1.0 + u01(gen);
    p.epsilon = p.gamma - 1.0 + 0.1 + 0.9 * u01(gen);
    p.B = 1.0 + 999.0 * u01(gen);
    p.eta_trans = 0.001 + 0.999 * u01(gen);
  }
  return draws;
}

SimConfig starvation_scenario() {
  SimConfig c;
  c.topology.modules = {{0, {0, 0}, {}}, {1, {1, 0}, {}}};
  c.timing.tau_q_p = 50'000;
  c.links = {{{0, 1}, 1000, 0.1, {}}};
  c.workload.mode = WorkloadConfig::Mode::Periodic;
  c.workload.period_ns = 60'000;
  c.workload.participants = {0, 1};
  c.protocol.jitter = 0.0;
  c.duration_ns = 60'000LL * 2000;
  c.seed = 7;
  return c;
}

template <class F>
void run_kernel(benchmark::State& state, F&& f) {
  for (auto _ : state) benchmark::DoNotOptimize(f());
}

void BM_CostCurveSerial(benchmark::State& state) {
  const auto grid = kernels::log_grid(1.0, 1e12, static_cast<int>(state.range(0)));
  run_kernel(state, [&] { return kernels::serial::cost_curve(ScalingParams{}, grid); });
}
void BM_CostCurveParallel(benchmark::State& state) {
  const auto grid = kernels::log_grid(1.0, 1e12, static_cast<int>(state.range(0)));
  run_kernel(state, [&] { return kernels::parallel::cost_curve(ScalingParams{}, grid); });
}

void BM_LatencyCurveSerial(benchmark::State& state) {
  const auto grid = kernels::log_grid(1.0, 1e8, static_cast<int>(state.range(0)));
  run_kernel(state, [&] { return kernels::serial::latency_curve(TimingParams{}, grid); });
}
void BM_LatencyCurveParallel(benchmark::State& state) {
  const auto grid = kernels::log_grid(1.0, 1e8, static_cast<int>(state.range(0)));
  run_kernel(state, [&] { return kernels::parallel::latency_curve(TimingParams{}, grid); });
}

void BM_CrossoverViolationsSerial(benchmark::State& state) {
  const auto draws = random_draws(static_cast<std::size_t>(state.range(0)));
  run_kernel(state, [&] { return kernels::serial::crossover_violations(draws, 10.0); });
}
void BM_CrossoverViolationsParallel(benchmark::State& state) {
  const auto draws = random_draws(static_cast<std::size_t>(state.range(0)));
  run_kernel(state, [&] { return kernels::parallel::crossover_violations(draws, 10.0); });
}

const std::vector<double> kEtas{0.001, 0.01, 0.1, 1.0};

void BM_StarvationSerial(benchmark::State& state) {
  const auto base = starvation_scenario();
  run_kernel(state, [&] { return kernels::serial::starvation_curve(base, kEtas); });
}
void BM_StarvationParallel(benchmark::State& state) {
  const auto base = starvation_scenario();
  run_kernel(state, [&] { return kernels::parallel::starvation_curve(base, kEtas); });
}

}  // namespace

BENCHMARK(BM_CostCurveSerial)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_CostCurveParallel)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_LatencyCurveSerial)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_LatencyCurveParallel)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_CrossoverViolationsSerial)->Arg(1 << 18)->UseRealTime();
BENCHMARK(BM_CrossoverViolationsParallel)->Arg(1 << 18)->UseRealTime();
BENCHMARK(BM_StarvationSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StarvationParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
