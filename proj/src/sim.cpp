#include "lylatherm/sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "lylatherm/lyapunov.hpp"

namespace lylatherm {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void refresh_cache(SimState& s, const Controller& c) {
  s.e = tracking_error(s.x, s.t);
  s.temperature = temperature(c.law, s.x, s.theta, s.e);
  s.diffusion = diffusion_coefficient(c.law, c.gains, s.x, s.theta, s.e);
  s.approx_error = (plant_drift(s.x) - forward(c.shape, s.theta, s.x)).norm();
  const Vector tilde = c.reference_theta.size() == 0 ? Vector(-s.theta) : Vector(c.reference_theta - s.theta);
  s.lyapunov_proxy = lyapunov_value(s.e, tilde, c.gains.gamma);
}

SimState make_state(const Controller& c, std::int64_t step_index, double t, Vector x, Vector theta) {
  require_size(x, kPlantDim, "state x");
  require_size(theta, c.shape.param_count(), "state theta");
  SimState s;
  s.step = step_index;
  s.t = t;
  s.x = std::move(x);
  s.theta = std::move(theta);
  refresh_cache(s, c);
  return s;
}

SimState step(const SimState& s, const Controller& c, double dt, RandomSource& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const Index p = s.theta.size();
  const Gains& g = c.gains;

  const DesiredState d = desired(s.t);
  const Vector e = s.x - d.position;
  Vector phi;
  Matrix jac;
  evaluate(c.shape, s.theta, s.x, phi, &jac);

  // Controller with g = I, so u is the bracketed term itself.
  Vector u = d.velocity - g.k_e * e - phi;
  if (g.k_T != 0.0) u -= g.compensation(p) * mu(c.law, s.x, s.theta, e);
  Vector x_next = s.x + (plant_drift(s.x) + u) * dt;

  Vector theta_next = s.theta + (g.gamma * dt) * proj(c.ball, s.theta, drift(jac, c.law, g, s.x, s.theta, e));
  const double diffusion = diffusion_coefficient(c.law, g, s.x, s.theta, e);
  if (diffusion > 0.0) {
    const Vector dw = wiener_increment(rng, p, dt);
    theta_next += g.gamma * proj(c.ball, s.theta, diffusion * dw);
  }

  const std::int64_t next_index = s.step + 1;
  if (!all_finite(x_next) || !all_finite(theta_next)) {
    throw DivergenceError(next_index, "non-finite state at step " + std::to_string(next_index));
  }
  const bool clipped = clip_to_layer(c.ball, theta_next);

  SimState next = make_state(c, next_index, s.t + dt, std::move(x_next), std::move(theta_next));
  next.clipped = clipped;
  return next;
}

void TrajectoryLog::record(const SimState& s) {
  ++samples;
  sum_e_sq += s.e.squaredNorm();
  sum_approx_sq += s.approx_error * s.approx_error;
  sup_x_norm = std::max(sup_x_norm, s.x.norm());
  sup_e_norm = std::max(sup_e_norm, s.e.norm());
  sup_theta_norm = std::max(sup_theta_norm, s.theta.norm());
  if (s.clipped) ++clip_count;
  clip_since_row_ = clip_since_row_ || s.clipped;

  if (s.step % stride == 0) {
    LogRow row;
    row.t = s.t;
    row.x = s.x;
    row.e = s.e;
    row.e_norm = s.e.norm();
    row.theta_norm = s.theta.norm();
    row.temperature = s.temperature;
    row.diffusion = s.diffusion;
    row.lyapunov_proxy = s.lyapunov_proxy;
    row.approx_error = s.approx_error;
    row.clipped = clip_since_row_;
    rows.push_back(row);
    clip_since_row_ = false;
  }
  final_x = s.x;
  final_theta = s.theta;
}

Network initial_network(const ExperimentConfig& config, std::uint64_t seed) {
  const std::uint64_t base = config.init_mode == InitMode::Shared ? config.init_seed : seed;
  RandomSource rng(RandomSource::derive(base, kInitStream));
  return he_init(config.network_shape(), rng);
}

Controller make_controller(const ExperimentConfig& config, Scenario scenario, Vector reference_theta) {
  Controller c{config.network_shape(), config.ball, config.law_for(scenario), config.gains_for(scenario),
               std::move(reference_theta)};
  if (c.reference_theta.size() != 0) require_size(c.reference_theta, c.shape.param_count(), "reference theta");
  return c;
}

TrajectoryLog run(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed,
                  const Vector& reference_theta) {
  config.validate();
  const Controller c = make_controller(config, scenario, reference_theta);

  Vector theta0 = initial_network(config, seed).theta;
  const bool clipped0 = clip_to_layer(c.ball, theta0);
  RandomSource noise(RandomSource::derive(seed, kNoiseStream));

  TrajectoryLog log;
  log.scenario = scenario;
  log.seed = seed;
  log.dt = config.dt;
  log.stride = config.stride;
  const auto n_steps = static_cast<std::int64_t>(std::llround(config.horizon / config.dt));
  log.rows.reserve(static_cast<std::size_t>(n_steps / config.stride + 1));

  SimState s = make_state(c, 0, 0.0, config.initial_state, std::move(theta0));
  s.clipped = clipped0;
  log.record(s);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    try {
      s = step(s, c, config.dt, noise);
    } catch (const DivergenceError& err) {
      log.steps = k;
      throw RunDivergedError(err, std::move(log));
    }
    log.record(s);
  }
  log.steps = n_steps;
  return log;
}

Vector reference_weights(const ExperimentConfig& config, std::uint64_t seed) {
  ExperimentConfig ref = config;
  ref.horizon = config.reference_horizon;
  ref.stride = std::max<int>(1, static_cast<int>(std::llround(config.reference_horizon / config.dt)));
  return run(ref, Scenario::S1, seed).final_theta;
}

std::vector<Vector> off_trajectory_points(int count, double lo, double hi, RandomSource& rng) {
  if (count < 1) throw std::invalid_argument("off_trajectory_points: count must be >= 1");
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector pt(kPlantDim);
    for (Index j = 0; j < kPlantDim; ++j) pt[j] = rng.uniform(lo, hi);
    points.push_back(std::move(pt));
  }
  return points;
}

MetricsReport metrics(const TrajectoryLog& log, const Approximator& final_model,
                      std::span<const Vector> offtraj_points) {
  if (log.samples == 0) throw std::invalid_argument("metrics: empty log");
  if (offtraj_points.empty()) throw std::invalid_argument("metrics: no off-trajectory points");
  MetricsReport r;
  r.rms_tracking = std::sqrt(log.sum_e_sq / static_cast<double>(log.samples));
  r.rms_approx = std::sqrt(log.sum_approx_sq / static_cast<double>(log.samples));
  double acc = 0.0;
  for (const auto& pt : offtraj_points) acc += (plant_drift(pt) - final_model(pt)).squaredNorm();
  r.rms_offtraj = std::sqrt(acc / static_cast<double>(offtraj_points.size()));
  return r;
}

MetricsReport metrics(const TrajectoryLog& log, const Network& final_net,
                      std::span<const Vector> offtraj_points) {
  return metrics(log, [&](const Vector& x) { return forward(final_net, x); }, offtraj_points);
}

MetricsReport metrics(const TrajectoryLog& log, const Network& final_net, RandomSource& rng, int count,
                      double lo, double hi) {
  const auto points = off_trajectory_points(count, lo, hi, rng);
  return metrics(log, final_net, points);
}

double windowed_mean(const TrajectoryLog& log, double t0, double t1, double LogRow::*column) {
  double acc = 0.0;
  std::size_t n = 0;
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));
  for (const auto& row : log.rows) {
    if (row.t >= t0 - slack && row.t <= t1 + slack) {
      acc += row.*column;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("windowed_mean: no rows in window");
  return acc / static_cast<double>(n);
}

void write_log_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t,x1,x2,x3,x4,x5,e1,e2,e3,e4,e5,e_norm,theta_norm,T,diffusion,V_L_proxy,approx_error,clip_flag\n";
  for (const auto& row : log.rows) {
    put(out, row.t);
    for (int i = 0; i < 5; ++i) out << ',', put(out, row.x[i]);
    for (int i = 0; i < 5; ++i) out << ',', put(out, row.e[i]);
    for (double v : {row.e_norm, row.theta_norm, row.temperature, row.diffusion, row.lyapunov_proxy,
                     row.approx_error}) {
      out << ',';
      put(out, v);
    }
    out << ',' << (row.clipped ? 1 : 0) << '\n';
  }
}

}  // namespace lylatherm
