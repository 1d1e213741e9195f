#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lylatherm/config.hpp"
#include "lylatherm/sim.hpp"

namespace lylatherm {

// OpenMP kernels and the serial implementations they are tested against.
// Runs are independent (own RandomSource, own log), so the parallel sweep
// returns exactly what the serial sweep returns, in job order.

struct RunJob {
  Scenario scenario = Scenario::S1;
  std::uint64_t seed = 0;
  const Vector* reference = nullptr;  // theta_ref for the Lyapunov proxy; may be null
};

struct RunOutcome {
  RunJob job;
  bool diverged = false;
  std::string error;
  std::int64_t divergence_step = -1;
  TrajectoryLog log;
  MetricsReport metrics;
  // Mean temperature over the first and last sixth of the horizon.
  double temperature_early = 0.0;
  double temperature_late = 0.0;
};

struct SweepOptions {
  // Drop per-row logs after the outcome callback to bound memory.
  bool keep_rows = true;
  // Called from the worker thread that finished the run; must be thread-safe.
  std::function<void(const RunOutcome&)> on_complete;
};

RunOutcome execute_job(const ExperimentConfig& config, const RunJob& job, std::span<const Vector> offtraj_points);

std::vector<RunOutcome> run_sweep_serial(const ExperimentConfig& config, std::span<const RunJob> jobs,
                                         std::span<const Vector> offtraj_points, const SweepOptions& options = {});

std::vector<RunOutcome> run_sweep_parallel(const ExperimentConfig& config, std::span<const RunJob> jobs,
                                           std::span<const Vector> offtraj_points, int workers,
                                           const SweepOptions& options = {});

// RMS of ||f(x_i) - Phi(x_i, theta)|| over a batch of points.
double function_error_rms_serial(const NetworkShape& shape, const Vector& theta, std::span<const Vector> points);
double function_error_rms_parallel(const NetworkShape& shape, const Vector& theta, std::span<const Vector> points,
                                   int workers = 0);

int available_workers();

}  // namespace lylatherm
