// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Criteria 3, 4, 5 and 8 share one 100-seed sweep of all four scenarios.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lylatherm/experiment.hpp"
#include "lylatherm/lyapunov.hpp"
#include "lylatherm/parallel.hpp"

using namespace lylatherm;

namespace {

constexpr int kSweepSeeds = 100;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector random_vector(RandomSource& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

void jacobian_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::vector<int>> shapes{{5, 8, 8, 5}, {3, 6, 2}, {2, 4, 4, 4, 1},
                                             {4, 3},         {5, 7, 5}, {1, 8, 8, 3}};
  RandomSource rng(1001);
  double worst = 0.0;
  int nets = 0;
  for (int trial = 0; trial < 24; ++trial) {
    NetworkShape shape{shapes[trial % shapes.size()]};
    if (shape.param_count() > 200) continue;
    const auto net = he_init(shape, rng);
    const Vector x = random_vector(rng, shape.input_size());
    const Matrix analytic = weight_jacobian(net, x);
    const Matrix numeric =
        finite_diff_jacobian([&](const Vector& t) { return forward(shape, t, x); }, net.theta, 1e-6);
    const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
    ++nets;
  }
  const double elapsed = seconds_since(t0);
  report(1, "Jacobian oracle", nets >= 20 && worst < 1e-5 && elapsed < 30.0,
         fmt("nets=%d max_rel_err=%.3e (<1e-5) time=%.2fs (<30s)", nets, worst, elapsed));
}

void taylor_scaling() {
  const auto shape = NetworkShape::uniform(5, 9, 10, 5);
  RandomSource rng(1002);
  double slope_sum = 0.0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    const auto net = he_init(shape, rng);
    const Vector x = random_vector(rng, 5);
    Vector d = random_vector(rng, shape.param_count());
    d.normalize();
    const Vector phi = forward(net, x);
    const Matrix jac = weight_jacobian(net, x);
    // Least-squares slope over a log-spaced grid in [1e-3, 1e-1].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 9;
    for (int i = 0; i < n; ++i) {
      const double s = std::pow(10.0, -3.0 + 2.0 * i / (n - 1));
      const double r = (forward(shape, net.theta + s * d, x) - phi - jac * (s * d)).norm();
      const double lx = std::log(s), ly = std::log(r);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    slope_sum += (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  const double slope = slope_sum / trials;
  report(2, "Taylor remainder scaling", std::abs(slope - 2.0) <= 0.1, fmt("mean slope=%.4f (2.0 +/- 0.1)", slope));
}

void stochastic_sanity() {
  RandomSource rng(1006);
  const double dt = 1e-3;
  const int draws = 100'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double w = wiener_increment(rng, 1, dt)(0);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  const bool var_ok = std::abs(var / dt - 1.0) <= 0.05;

  ExperimentConfig config;
  config.reference = ReferenceMode::None;
  config.stride = 1;
  auto csv = [&](std::uint64_t seed) {
    std::ostringstream out;
    const auto log = run(config, Scenario::S1, seed);
    write_log_csv(log, out);
    for (Index i = 0; i < log.final_theta.size(); ++i) out << log.final_theta[i] << '\n';
    return out.str();
  };
  const std::string a = csv(0), b = csv(1), c = csv(123456789);
  const bool identical = a == b && a == c;
  report(6, "Stochastic sanity", var_ok && identical,
         fmt("var/dt=%.4f (1 +/- 0.05) kT=0 bit-identical across seeds=%s", var / dt, identical ? "yes" : "no"));
}

void lyapunov_algebra() {
  RandomSource rng(1007);
  bool sandwich = true;
  for (int i = 0; i < 10'000; ++i) {
    const double gamma = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const Vector e = random_vector(rng, 5, 2.0);
    const Vector th = random_vector(rng, 50, 2.0);
    const double z2 = e.squaredNorm() + th.squaredNorm();
    const double v = lyapunov_value(e, th, gamma);
    sandwich = sandwich && rayleigh_lower(gamma) * z2 <= v * (1.0 + 1e-15) && v <= rayleigh_upper(gamma) * z2 * (1.0 + 1e-15);
  }

  // Independent evaluation of the escape-risk bound.
  auto reference = [](double gamma, double b0, double b1, double b2, double a0, double a1, double a2, double xd,
                      double lambda, double v0, double t) {
    const double al1 = 0.5 * std::min(1.0, 1.0 / gamma);
    const double al2 = 0.5 * std::max(1.0, 1.0 / gamma);
    auto rho = [&](double s) { return (a2 * (s + xd) * (s + xd) + a1 * (s + xd) + a0) * s; };
    double lo = 0.0, hi = 1.0;
    while (rho(hi) < b0 - b2) hi *= 2.0;
    for (int k = 0; k < 300; ++k) {
      const double mid = 0.5 * (lo + hi);
      (rho(mid) < b0 - b2 ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    return v0 / (al1 * r * r) + v0 / lambda * std::exp(-b1 * t) + al2 * b1 / (lambda * b2);
  };

  bool monotone = true;
  double worst = 0.0;
  int cases = 0;
  for (int i = 0; i < 200; ++i) {
    LyapunovConstants c;
    c.gamma = std::pow(10.0, rng.uniform(-1.0, 1.0));
    c.b2 = rng.uniform(0.5, 2.0);
    c.b0 = c.b2 + rng.uniform(5.0, 100.0);
    c.b1 = rng.uniform(0.01, 0.5);
    c.rho = RemainderPolynomial{rng.uniform(0.1, 1.0), rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.2), std::sqrt(11.0)};
    const auto [lo, hi] = c.lambda_interval();
    if (lo > hi) continue;
    c.lambda = rng.uniform(lo, hi);
    const double v0 = rng.uniform(0.0, 3.0);
    double previous = INFINITY;
    for (double t = 0.0; t <= 50.0; t += 0.5) {
      const double v = escape_risk(c, v0, t);
      monotone = monotone && v <= previous;
      previous = v;
      const double ref = reference(c.gamma, c.b0, c.b1, c.b2, c.rho.a0, c.rho.a1, c.rho.a2, c.rho.desired_bound,
                                   c.lambda, v0, t);
      worst = std::max(worst, std::abs(v - ref) / std::max(1e-300, std::abs(ref)));
    }
    ++cases;
  }
  report(7, "Lyapunov algebra", sandwich && monotone && worst < 1e-10 && cases > 100,
         fmt("sandwich=%s monotone=%s cases=%d max_rel_diff=%.2e", sandwich ? "ok" : "violated",
             monotone ? "ok" : "violated", cases, worst));
}

struct ScenarioStats {
  int runs = 0;
  int completed = 0;
  int bounded = 0;
  int decayed = 0;
  double sum_e = 0, sum_f = 0, sum_off = 0;
  std::int64_t clips = 0;
  double worst_theta = 0.0;
  double sup_x = 0.0;
};

void sweep_criteria() {
  ExperimentConfig config;
  config.reference = ReferenceMode::None;
  std::vector<RunJob> jobs;
  for (int seed = 0; seed < kSweepSeeds; ++seed) {
    for (auto s : {Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4}) {
      jobs.push_back({s, static_cast<std::uint64_t>(seed), nullptr});
    }
  }
  RandomSource offtraj(config.offtraj_seed);
  const auto points = off_trajectory_points(config.offtraj_count, config.offtraj_low, config.offtraj_high, offtraj);
  SweepOptions options;
  options.keep_rows = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto outcomes = run_sweep_parallel(config, jobs, points, available_workers(), options);
  std::printf("# sweep: %zu runs on %d workers in %.1fs\n", outcomes.size(), available_workers(), seconds_since(t0));

  const double limit = std::sqrt(config.ball.radius * config.ball.radius + config.ball.layer);
  std::map<Scenario, ScenarioStats> stats;
  for (const auto& o : outcomes) {
    auto& st = stats[o.job.scenario];
    ++st.runs;
    st.clips += o.log.clip_count;
    st.worst_theta = std::max(st.worst_theta, o.log.sup_theta_norm);
    if (o.diverged || o.log.steps != 30'000) continue;
    ++st.completed;
    st.sup_x = std::max(st.sup_x, o.log.sup_x_norm);
    st.bounded += o.log.sup_x_norm <= 50.0;
    st.decayed += o.temperature_late < 0.1 * o.temperature_early;
    st.sum_e += o.metrics.rms_tracking;
    st.sum_f += o.metrics.rms_approx;
    st.sum_off += o.metrics.rms_offtraj;
  }
  auto mean = [&](Scenario s, double ScenarioStats::*field) { return stats[s].*field / stats[s].completed; };

  std::printf("# %-3s %5s %10s %10s %10s %7s\n", "", "runs", "RMS e", "RMS f-Phi", "off-traj", "clips");
  for (auto s : {Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4}) {
    std::printf("# %-3s %5d %10.5f %10.5f %10.5f %7lld\n", std::string(scenario_name(s)).c_str(), stats[s].completed,
                mean(s, &ScenarioStats::sum_e), mean(s, &ScenarioStats::sum_f), mean(s, &ScenarioStats::sum_off),
                static_cast<long long>(stats[s].clips));
  }

  // 3: projection safety.
  bool inside = true;
  std::int64_t clips = 0;
  for (auto& [s, st] : stats) {
    inside = inside && st.worst_theta <= limit * (1.0 + 1e-12);
    clips += st.clips;
  }
  report(3, "Projection safety", inside,
         fmt("max|theta|=%.4f (<= %.4f) clips=%lld (expected 0) seeds=%d", std::max({stats[Scenario::S1].worst_theta,
             stats[Scenario::S2].worst_theta, stats[Scenario::S3].worst_theta, stats[Scenario::S4].worst_theta}),
             limit, static_cast<long long>(clips), kSweepSeeds));

  // 4: trend reproduction.
  const double e1 = mean(Scenario::S1, &ScenarioStats::sum_e);
  const double f1 = mean(Scenario::S1, &ScenarioStats::sum_f);
  const double o1 = mean(Scenario::S1, &ScenarioStats::sum_off);
  const bool a = e1 >= 0.037 && e1 <= 0.147;
  bool b = true, c = true, d = true;
  std::string detail = fmt("(a) S1 RMS e=%.4f [0.037,0.147] %s", e1, a ? "ok" : "FAIL");
  for (auto s : {Scenario::S2, Scenario::S3, Scenario::S4}) {
    const double ie = improvement_percent(e1, mean(s, &ScenarioStats::sum_e));
    const double iff = improvement_percent(f1, mean(s, &ScenarioStats::sum_f));
    const double io = improvement_percent(o1, mean(s, &ScenarioStats::sum_off));
    b = b && ie >= 5.0;
    c = c && iff >= 5.0;
    d = d && io >= 0.0;
    detail += fmt("; %s e=%+.2f%% f-Phi=%+.2f%% off=%+.2f%%", std::string(scenario_name(s)).c_str(), ie, iff, io);
  }
  detail += fmt(" | (b)%s (c)%s (d)%s", b ? "ok" : "FAIL", c ? "ok" : "FAIL", d ? "ok" : "FAIL");
  report(4, "Trend reproduction", a && b && c && d, detail);

  // 5: consistency identity for S1.
  const double ratio = e1 / (f1 / config.gains.k_e);
  report(5, "Consistency identity", ratio >= 0.5 && ratio <= 2.0,
         fmt("RMS e=%.4f RMS(f-Phi)/k_e=%.4f ratio=%.3f [0.5,2]", e1, f1 / config.gains.k_e, ratio));

  // 8: boundedness in probability.
  bool all_bounded = true, decay = true;
  std::string detail8;
  for (auto s : {Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4}) {
    const auto& st = stats[s];
    all_bounded = all_bounded && st.runs >= kSweepSeeds && st.completed == st.runs && st.bounded == st.runs;
    detail8 += fmt("%s %d/%d bounded (sup|x|=%.2f)", std::string(scenario_name(s)).c_str(), st.bounded, st.runs, st.sup_x);
    if (s != Scenario::S1) {
      const double frac = static_cast<double>(st.decayed) / st.runs;
      decay = decay && frac >= 0.9;
      detail8 += fmt(" decay=%.0f%%", 100.0 * frac);
    }
    detail8 += "; ";
  }
  report(8, "Boundedness in probability", all_bounded && decay, detail8);
}

}  // namespace

int main() {
  jacobian_oracle();
  taylor_scaling();
  stochastic_sanity();
  lyapunov_algebra();
  sweep_criteria();
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
