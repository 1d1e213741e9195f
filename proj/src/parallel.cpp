#include "lylatherm/parallel.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace lylatherm {

namespace {

void finish(RunOutcome& outcome, const SweepOptions& options) {
  if (options.on_complete) options.on_complete(outcome);
  if (!options.keep_rows) {
    outcome.log.rows.clear();
    outcome.log.rows.shrink_to_fit();
  }
}

}  // namespace

int available_workers() { return omp_get_max_threads(); }

RunOutcome execute_job(const ExperimentConfig& config, const RunJob& job, std::span<const Vector> offtraj_points) {
  RunOutcome outcome;
  outcome.job = job;
  const Vector no_reference;
  try {
    outcome.log = run(config, job.scenario, job.seed, job.reference ? *job.reference : no_reference);
  } catch (const RunDivergedError& err) {
    outcome.diverged = true;
    outcome.error = err.what();
    outcome.divergence_step = err.step_index();
    outcome.log = err.partial_log();
    return outcome;
  } catch (const std::exception& err) {
    outcome.diverged = true;
    outcome.error = err.what();
    return outcome;
  }
  const Network final_net(config.network_shape(), outcome.log.final_theta);
  outcome.metrics = metrics(outcome.log, final_net, offtraj_points);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double sixth = config.horizon / 6.0;
  try {
    outcome.temperature_early = windowed_mean(outcome.log, 0.0, sixth, &LogRow::temperature);
    outcome.temperature_late = windowed_mean(outcome.log, config.horizon - sixth, config.horizon, &LogRow::temperature);
  } catch (const std::invalid_argument&) {
    outcome.temperature_early = outcome.temperature_late = nan;
  }
  return outcome;
}

std::vector<RunOutcome> run_sweep_serial(const ExperimentConfig& config, std::span<const RunJob> jobs,
                                         std::span<const Vector> offtraj_points, const SweepOptions& options) {
  std::vector<RunOutcome> outcomes(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    outcomes[i] = execute_job(config, jobs[i], offtraj_points);
    finish(outcomes[i], options);
  }
  return outcomes;
}

std::vector<RunOutcome> run_sweep_parallel(const ExperimentConfig& config, std::span<const RunJob> jobs,
                                           std::span<const Vector> offtraj_points, int workers,
                                           const SweepOptions& options) {
  std::vector<RunOutcome> outcomes(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
  const int threads = workers > 0 ? workers : available_workers();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    outcomes[i] = execute_job(config, jobs[i], offtraj_points);
    finish(outcomes[i], options);
  }
  return outcomes;
}

double function_error_rms_serial(const NetworkShape& shape, const Vector& theta, std::span<const Vector> points) {
  if (points.empty()) throw std::invalid_argument("function_error_rms: no points");
  double acc = 0.0;
  for (const auto& x : points) acc += (plant_drift(x) - forward(shape, theta, x)).squaredNorm();
  return std::sqrt(acc / static_cast<double>(points.size()));
}

double function_error_rms_parallel(const NetworkShape& shape, const Vector& theta, std::span<const Vector> points,
                                   int workers) {
  if (points.empty()) throw std::invalid_argument("function_error_rms: no points");
  const auto n = static_cast<std::int64_t>(points.size());
  const int threads = workers > 0 ? workers : available_workers();
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    acc += (plant_drift(points[i]) - forward(shape, theta, points[i])).squaredNorm();
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace lylatherm
