// Serial vs OpenMP kernels: batched off-trajectory function error, the run
// sweep, and the single-step cost that dominates every run.

#include <benchmark/benchmark.h>

#include "lylatherm/parallel.hpp"

namespace {

using namespace lylatherm;

std::vector<Vector> make_points(int n) {
  RandomSource rng(11);
  return off_trajectory_points(n, -0.5, 0.5, rng);
}

void BM_FunctionErrorSerial(benchmark::State& state) {
  const auto shape = NetworkShape::uniform(5, 9, 10, 5);
  RandomSource rng(1);
  const auto net = he_init(shape, rng);
  const auto points = make_points(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(function_error_rms_serial(shape, net.theta, points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FunctionErrorSerial)->Arg(90)->Arg(4096);

void BM_FunctionErrorParallel(benchmark::State& state) {
  const auto shape = NetworkShape::uniform(5, 9, 10, 5);
  RandomSource rng(1);
  const auto net = he_init(shape, rng);
  const auto points = make_points(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(function_error_rms_parallel(shape, net.theta, points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FunctionErrorParallel)->Arg(90)->Arg(4096);

ExperimentConfig short_config() {
  ExperimentConfig config;
  config.horizon = 0.5;
  config.stride = 50;
  config.reference = ReferenceMode::None;
  return config;
}

std::vector<RunJob> sweep_jobs() {
  std::vector<RunJob> jobs;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (auto s : {Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4}) jobs.push_back({s, seed, nullptr});
  }
  return jobs;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto config = short_config();
  const auto jobs = sweep_jobs();
  const auto points = make_points(90);
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(config, jobs, points));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
  const auto config = short_config();
  const auto jobs = sweep_jobs();
  const auto points = make_points(90);
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_parallel(config, jobs, points, 0));
}
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  ExperimentConfig config;
  const auto controller = make_controller(config, Scenario::S4);
  auto s = make_state(controller, 0, 0.0, config.initial_state, initial_network(config, 0).theta);
  RandomSource rng(3);
  for (auto _ : state) {
    s = step(s, controller, config.dt, rng);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_Step);

}  // namespace

BENCHMARK_MAIN();
