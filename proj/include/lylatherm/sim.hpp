#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lylatherm/config.hpp"
#include "lylatherm/network.hpp"
#include "lylatherm/numerics.hpp"
#include "lylatherm/plant.hpp"
#include "lylatherm/projection.hpp"
#include "lylatherm/thermo.hpp"

namespace lylatherm {

using PlantVector = Eigen::Matrix<double, 5, 1>;

/// Everything that stays fixed while one trajectory is integrated.
struct Controller {
  NetworkShape shape;
  ConvexBall ball;
  TemperatureLaw law;
  Gains gains;
  // theta_ref of the Lyapunov proxy theta_tilde = theta_ref - theta_hat.
  // Empty means theta_ref = 0.
  Vector reference_theta;
};

/// Integrator state (t, x, theta_hat) plus diagnostics derived from it.
struct SimState {
  std::int64_t step = 0;
  double t = 0.0;
  Vector x;
  Vector theta;

  Vector e;
  double temperature = 0.0;
  double diffusion = 0.0;
  double approx_error = 0.0;  // ||f(x) - Phi(x, theta_hat)||
  double lyapunov_proxy = 0.0;
  bool clipped = false;  // theta_hat was rescaled onto the layer boundary this step
};

// Builds a state and fills its cached diagnostics.
SimState make_state(const Controller& c, std::int64_t step, double t, Vector x, Vector theta);

// Recomputes the cached fields from (t, x, theta).
void refresh_cache(SimState& s, const Controller& c);

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step_index, const std::string& what)
      : std::runtime_error(what), step_index_(step_index) {}
  std::int64_t step_index() const { return step_index_; }

 private:
  std::int64_t step_index_;
};

/// One Euler-Maruyama step of the coupled plant / weight SDE:
///
///   u      = x_d_dot - k_e e - Phi - (p+1) gamma k_T mu / 2
///   x+     = x + (f(x) + u) dt
///   theta+ = theta + gamma proj(drift) dt + gamma proj(sqrt(k_T T) dw)
///
/// followed by a radial clip onto Pi_eps when the discrete step leaves it.
/// No random numbers are drawn while the diffusion coefficient is zero.
SimState step(const SimState& s, const Controller& c, double dt, RandomSource& rng);

struct LogRow {
  double t = 0.0;
  PlantVector x;
  PlantVector e;
  double e_norm = 0.0;
  double theta_norm = 0.0;
  double temperature = 0.0;
  double diffusion = 0.0;
  double lyapunov_proxy = 0.0;
  double approx_error = 0.0;
  bool clipped = false;  // any clip since the previous row
};

struct TrajectoryLog {
  Scenario scenario = Scenario::S1;
  std::uint64_t seed = 0;
  double dt = 0.0;
  int stride = 1;
  std::vector<LogRow> rows;

  // Full-resolution accumulators over every integrated state, t = 0 included.
  std::int64_t steps = 0;
  std::int64_t samples = 0;
  double sum_e_sq = 0.0;
  double sum_approx_sq = 0.0;
  std::int64_t clip_count = 0;
  double sup_x_norm = 0.0;
  double sup_e_norm = 0.0;
  double sup_theta_norm = 0.0;

  Vector final_x;
  Vector final_theta;

  // Accumulates s; appends a row when s.step is a multiple of stride.
  void record(const SimState& s);

 private:
  bool clip_since_row_ = false;
};

class RunDivergedError : public DivergenceError {
 public:
  RunDivergedError(const DivergenceError& cause, TrajectoryLog partial)
      : DivergenceError(cause), partial_(std::move(partial)) {}
  const TrajectoryLog& partial_log() const { return partial_; }

 private:
  TrajectoryLog partial_;
};

// Stream ids for RandomSource::derive.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;

// theta_hat(0) for a run with this seed (honours config.init_mode).
Network initial_network(const ExperimentConfig& config, std::uint64_t seed);

Controller make_controller(const ExperimentConfig& config, Scenario scenario, Vector reference_theta = {});

/// Integrates one scenario over [0, horizon] from config.initial_state.
/// Throws RunDivergedError carrying the partial log on NaN/Inf.
TrajectoryLog run(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed,
                  const Vector& reference_theta = {});

// Final weights of a deterministic S1 run over reference_horizon.
Vector reference_weights(const ExperimentConfig& config, std::uint64_t seed);

using Approximator = std::function<Vector(const Vector&)>;

struct MetricsReport {
  double rms_tracking = 0.0;    // RMS ||e||
  double rms_approx = 0.0;      // RMS ||f - Phi|| along the trajectory
  double rms_offtraj = 0.0;     // RMS ||f - Phi_final|| on off-trajectory points
};

std::vector<Vector> off_trajectory_points(int count, double lo, double hi, RandomSource& rng);

MetricsReport metrics(const TrajectoryLog& log, const Approximator& final_model,
                      std::span<const Vector> offtraj_points);
MetricsReport metrics(const TrajectoryLog& log, const Network& final_net,
                      std::span<const Vector> offtraj_points);
MetricsReport metrics(const TrajectoryLog& log, const Network& final_net, RandomSource& rng,
                      int count = 90, double lo = -0.5, double hi = 0.5);

// Mean of a logged column over rows with t in [t0, t1].
double windowed_mean(const TrajectoryLog& log, double t0, double t1, double LogRow::*column);

void write_log_csv(const TrajectoryLog& log, std::ostream& out);

}  // namespace lylatherm
