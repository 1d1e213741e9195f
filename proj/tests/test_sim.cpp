#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lylatherm/lyapunov.hpp"
#include "lylatherm/sim.hpp"

using namespace lylatherm;

namespace {

ExperimentConfig short_config(double horizon = 1.0) {
  ExperimentConfig config;
  config.horizon = horizon;
  config.reference = ReferenceMode::None;
  return config;
}

std::string csv_of(const TrajectoryLog& log) {
  std::ostringstream out;
  write_log_csv(log, out);
  return out.str();
}

}  // namespace

TEST_CASE("cached state fields are recomputable") {
  const auto config = short_config();
  const auto c = make_controller(config, Scenario::S4);
  RandomSource rng(1);
  auto s = make_state(c, 0, 0.0, config.initial_state, initial_network(config, 0).theta);
  for (int i = 0; i < 50; ++i) s = step(s, c, config.dt, rng);
  SimState copy = s;
  refresh_cache(copy, c);
  CHECK((copy.e - s.e).norm() == 0.0);
  CHECK(copy.temperature == s.temperature);
  CHECK(copy.diffusion == s.diffusion);
  CHECK(copy.approx_error == s.approx_error);
  CHECK(copy.lyapunov_proxy == s.lyapunov_proxy);
  CHECK((s.e - tracking_error(s.x, s.t)).norm() < 1e-15);
  CHECK(s.temperature == doctest::Approx(temperature(c.law, s.x, s.theta, s.e)));
  CHECK(s.lyapunov_proxy == doctest::Approx(lyapunov_value(s.e, -s.theta, c.gains.gamma)));
  CHECK(s.step == 50);
  CHECK(s.t == doctest::Approx(0.05));
}

TEST_CASE("deterministic step is explicit Euler with projected drift") {
  const auto config = short_config();
  const auto c = make_controller(config, Scenario::S1);
  CHECK(c.gains.k_T == 0.0);
  const auto net = initial_network(config, 0);
  const auto s = make_state(c, 0, 0.0, config.initial_state, net.theta);
  RandomSource fresh(2);
  const auto next = step(s, c, config.dt, fresh);
  CHECK(fresh.next_u64() == RandomSource(2).next_u64());  // no draws were taken

  const Vector u = control_input(net, c.law, c.gains, s.x, s.theta, 0.0);
  const Vector x_expected = s.x + (plant_drift(s.x) + u) * config.dt;
  const Vector d = drift(net, c.ball, c.law, c.gains, s.x, s.theta, s.e);
  const Vector theta_expected = s.theta + c.gains.gamma * proj(c.ball, s.theta, d) * config.dt;
  CHECK((next.x - x_expected).norm() < 1e-13);
  CHECK((next.theta - theta_expected).norm() < 1e-13);
  CHECK((proj(c.ball, s.theta, d) - (weight_jacobian(net, s.x).transpose() * s.e - c.gains.sigma * s.theta)).norm() <
        1e-12);
}

TEST_CASE("stochastic step adds the scaled projected Wiener increment") {
  const auto config = short_config();
  const auto c = make_controller(config, Scenario::S2);
  const auto net = initial_network(config, 0);
  const auto s = make_state(c, 0, 0.0, config.initial_state, net.theta);
  RandomSource a(5), b(5);
  const auto next = step(s, c, config.dt, a);
  const Vector dw = wiener_increment(b, net.theta.size(), config.dt);
  const Vector d = drift(net, c.ball, c.law, c.gains, s.x, s.theta, s.e);
  const double varsigma = diffusion_coefficient(c.law, c.gains, s.x, s.theta, s.e);
  CHECK(varsigma == doctest::Approx(std::sqrt(0.03 * 9.0 * s.e.squaredNorm())));
  const Vector expected = s.theta + c.gains.gamma * proj(c.ball, s.theta, d) * config.dt +
                          c.gains.gamma * proj(c.ball, s.theta, varsigma * dw);
  CHECK((next.theta - expected).norm() < 1e-13);
}

TEST_CASE("horizon zero logs only the initial state") {
  const auto config = short_config(0.0);
  const auto log = run(config, Scenario::S2, 3);
  CHECK(log.rows.size() == 1);
  CHECK(log.samples == 1);
  CHECK(log.steps == 0);
  CHECK(log.rows[0].t == 0.0);
  CHECK((Vector(log.rows[0].x) - config.initial_state).norm() == 0.0);
  CHECK((log.final_x - config.initial_state).norm() == 0.0);
}

TEST_CASE("log grid follows dt times stride") {
  auto config = short_config(2.0);
  config.stride = 25;
  const auto log = run(config, Scenario::S3, 1);
  CHECK(log.rows.size() == 2000 / 25 + 1);
  CHECK(log.samples == 2001);
  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    CHECK(log.rows[i].t > log.rows[i - 1].t);
    CHECK(log.rows[i].t - log.rows[i - 1].t == doctest::Approx(0.025));
  }
  CHECK(log.rows.back().t == doctest::Approx(2.0));
}

TEST_CASE("same seed reproduces the log byte for byte") {
  const auto config = short_config(1.0);
  for (auto scenario : {Scenario::S2, Scenario::S4}) {
    const auto a = run(config, scenario, 11);
    const auto b = run(config, scenario, 11);
    CHECK(csv_of(a) == csv_of(b));
    CHECK((a.final_theta.array() == b.final_theta.array()).all());
    const auto c = run(config, scenario, 12);
    CHECK(csv_of(a) != csv_of(c));
  }
}

TEST_CASE("diffusion-off runs ignore the seed") {
  const auto config = short_config(2.0);
  const auto a = run(config, Scenario::S1, 0);
  const auto b = run(config, Scenario::S1, 987654321);
  CHECK(csv_of(a) == csv_of(b));
  CHECK((a.final_theta.array() == b.final_theta.array()).all());
}

TEST_CASE("per-seed initialisation draws distinct networks") {
  auto config = short_config();
  config.init_mode = InitMode::PerSeed;
  CHECK((initial_network(config, 1).theta - initial_network(config, 2).theta).norm() > 0.0);
  config.init_mode = InitMode::Shared;
  CHECK((initial_network(config, 1).theta - initial_network(config, 2).theta).norm() == 0.0);
}

TEST_CASE("halving dt barely changes the deterministic tracking RMS") {
  auto config = short_config(30.0);
  config.stride = 1000;
  const auto coarse = run(config, Scenario::S1, 0);
  config.dt = 5e-4;
  config.stride = 2000;
  const auto fine = run(config, Scenario::S1, 0);
  const double a = std::sqrt(coarse.sum_e_sq / coarse.samples);
  const double b = std::sqrt(fine.sum_e_sq / fine.samples);
  CHECK(std::abs(a - b) / b < 0.02);
}

TEST_CASE("unstable step size reports divergence with the partial log") {
  auto config = short_config(1.0);
  config.gains.k_e = 1e5;
  bool thrown = false;
  try {
    run(config, Scenario::S2, 0);
  } catch (const RunDivergedError& err) {
    thrown = true;
    CHECK(err.step_index() > 0);
    CHECK(err.step_index() < 1000);
    CHECK(err.partial_log().samples >= 1);
  }
  CHECK(thrown);
}

TEST_CASE("trajectory stays in the parameter layer and clips are logged") {
  auto config = short_config(3.0);
  config.ball.radius = 13.0;  // just under the initial norm, forces clipping
  config.stride = 1;
  for (auto scenario : {Scenario::S1, Scenario::S2, Scenario::S4}) {
    const auto log = run(config, scenario, 4);
    const double limit = std::sqrt(config.ball.radius * config.ball.radius + config.ball.layer);
    CHECK(log.sup_theta_norm <= limit * (1.0 + 1e-12));
    CHECK(log.clip_count > 0);
    std::int64_t flagged = 0;
    for (const auto& row : log.rows) flagged += row.clipped ? 1 : 0;
    CHECK(flagged == log.clip_count);
  }
}

TEST_CASE("default radius produces no clips over the full horizon") {
  const auto config = short_config(30.0);
  const auto log = run(config, Scenario::S1, 0);
  CHECK(log.clip_count == 0);
}

TEST_CASE("temperature is dominated by the squared error") {
  auto config = short_config(3.0);
  config.stride = 1;
  for (auto scenario : {Scenario::S3, Scenario::S4}) {
    const auto log = run(config, scenario, 2);
    const double q = config.temperature_quadratic, s = config.temperature_scale;
    const double bound_sq = scenario == Scenario::S3 ? log.sup_x_norm * log.sup_x_norm
                                                     : log.sup_theta_norm * log.sup_theta_norm;
    for (const auto& row : log.rows) {
      CHECK(row.temperature <= row.e_norm * row.e_norm * (q * bound_sq + s) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("metrics") {
  const auto config = short_config(1.0);
  const auto log = run(config, Scenario::S2, 0);
  RandomSource pts(7);
  const auto points = off_trajectory_points(90, -0.5, 0.5, pts);
  CHECK(points.size() == 90);
  for (const auto& p : points) CHECK(p.cwiseAbs().maxCoeff() <= 0.5);

  const auto exact = metrics(log, Approximator(plant_drift), points);
  CHECK(exact.rms_offtraj == 0.0);

  TrajectoryLog zero_error;
  zero_error.samples = 10;
  zero_error.sum_e_sq = 0.0;
  const auto m = metrics(zero_error, Approximator(plant_drift), points);
  CHECK(m.rms_tracking == 0.0);
  CHECK(m.rms_approx == 0.0);

  TrajectoryLog empty;
  CHECK_THROWS_AS(metrics(empty, Approximator(plant_drift), points), std::invalid_argument);

  // Full-resolution accumulators agree with the stride-1 rows.
  auto dense = config;
  dense.stride = 1;
  const auto full = run(dense, Scenario::S2, 0);
  double acc = 0.0;
  for (const auto& row : full.rows) acc += row.e_norm * row.e_norm;
  const Network net(config.network_shape(), full.final_theta);
  CHECK(metrics(full, net, points).rms_tracking == doctest::Approx(std::sqrt(acc / full.rows.size())));
}

TEST_CASE("windowed mean") {
  auto config = short_config(1.0);
  config.stride = 100;
  const auto log = run(config, Scenario::S2, 0);
  const double all = windowed_mean(log, 0.0, 1.0, &LogRow::temperature);
  double acc = 0.0;
  for (const auto& row : log.rows) acc += row.temperature;
  CHECK(all == doctest::Approx(acc / log.rows.size()));
  CHECK_THROWS_AS(windowed_mean(log, 5.0, 6.0, &LogRow::temperature), std::invalid_argument);
}

TEST_CASE("csv log header") {
  const auto log = run(short_config(0.0), Scenario::S1, 0);
  const auto text = csv_of(log);
  CHECK(text.rfind("t,x1,x2,x3,x4,x5,e1,e2,e3,e4,e5,e_norm,theta_norm,T,diffusion,V_L_proxy,approx_error,clip_flag\n",
                   0) == 0);
}
