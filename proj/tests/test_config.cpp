#include <doctest.h>

#include <string>

#include "lylatherm/config.hpp"

using namespace lylatherm;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty config yields the benchmark defaults") {
  const auto c = parse_config("");
  CHECK(c.horizon == 30.0);
  CHECK(c.dt == 1e-3);
  CHECK(c.stride == 10);
  CHECK(c.scenarios.size() == 4);
  CHECK(c.gains.gamma == 1.0);
  CHECK(c.gains.sigma == 0.001);
  CHECK(c.gains.k_T == 0.03);
  CHECK(c.gains.k_e == 100.0);
  CHECK(c.hidden_layers == 9);
  CHECK(c.hidden_width == 10);
  CHECK(c.network_shape().param_count() == 995);
  CHECK(c.ball.radius == 20.0);
  CHECK(c.ball.layer == 0.1);
  CHECK(c.temperature_scale == 9.0);
  CHECK(c.temperature_quadratic == 0.01);
  CHECK(c.offtraj_count == 90);
  CHECK(c.offtraj_low == -0.5);
  CHECK(c.offtraj_high == 0.5);
  CHECK(c.initial_state(2) == 3.0);
  CHECK(c.initial_state(3) == -3.0);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("scenario laws and gains") {
  const ExperimentConfig c;
  CHECK(c.gains_for(Scenario::S1).k_T == 0.0);
  CHECK(c.gains_for(Scenario::S2).k_T == 0.03);
  CHECK(c.law_for(Scenario::S1).kind == TemperatureKind::Mu2);
  CHECK(c.law_for(Scenario::S2).kind == TemperatureKind::Mu2);
  CHECK(c.law_for(Scenario::S3).kind == TemperatureKind::Mu3);
  CHECK(c.law_for(Scenario::S4).kind == TemperatureKind::Mu4);
}

TEST_CASE("full config parses every section") {
  const auto c = parse_config(R"(# sweep
[simulation]
horizon = 5
dt = 5e-4
stride = 4
scenarios = S2, S4
seeds = 3..6
initial_state = 1, 2, 3, 4, 5

[gains]
gamma = 0.5
sigma = 0.01
k_T = 0.05
k_e = 80

[network]
hidden_layers = 2
width = 7
init = per_seed
init_seed = 9

[projection]
radius = 15
layer = 0.2

[temperature]
scale = 4
quadratic = 0.1

[offtrajectory]
count = 10
low = -1
high = 1
seed = 3

[lyapunov]
reference = none
reference_horizon = 2

[output]
dir = out/here
workers = 3
csv = false
)");
  CHECK(c.horizon == 5.0);
  CHECK(c.dt == 5e-4);
  CHECK(c.stride == 4);
  CHECK(c.scenarios == std::vector<Scenario>{Scenario::S2, Scenario::S4});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(c.initial_state(4) == 5.0);
  CHECK(c.gains.gamma == 0.5);
  CHECK(c.gains.k_e == 80.0);
  CHECK(c.network_shape().param_count() == 6 * 7 + 8 * 7 + 8 * 5);
  CHECK(c.init_mode == InitMode::PerSeed);
  CHECK(c.init_seed == 9);
  CHECK(c.ball.radius == 15.0);
  CHECK(c.temperature_quadratic == 0.1);
  CHECK(c.offtraj_count == 10);
  CHECK(c.offtraj_seed == 3);
  CHECK(c.reference == ReferenceMode::None);
  CHECK(c.out_dir == "out/here");
  CHECK(c.workers == 3);
  CHECK_FALSE(c.write_csv);
}

TEST_CASE("render and parse round-trip") {
  auto c = parse_config("[simulation]\nseeds = 42\nscenarios = [S3]\n[gains]\nk_e = 12.5\n");
  const auto again = parse_config(render_config(c));
  CHECK(render_config(again) == render_config(c));
  CHECK(again.seeds.size() == 42);
  CHECK(again.scenarios == std::vector<Scenario>{Scenario::S3});
  CHECK(again.gains.k_e == 12.5);
}

TEST_CASE("config errors carry line numbers and key names") {
  CHECK(error_of("[gains]\nk_T = -1\n").find("k_T") != std::string::npos);
  CHECK(error_of("[gains]\nk_T = 0\n").find("k_T") != std::string::npos);
  CHECK(error_of("[gains]\nk_TT = 1\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[bogus]\n").find("cfg:1") != std::string::npos);
  CHECK(error_of("[simulation]\nhorizon = abc\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[simulation]\nno equals sign\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("horizon = 3\n") != "");
  CHECK(error_of("[simulation]\nscenarios = S9\n").find("scenarios") != std::string::npos);
  CHECK(error_of("[simulation]\ndt = 0\n").find("dt") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/lylatherm.ini"), ConfigError);
}

TEST_CASE("scenario selection") {
  const auto c = parse_config("[simulation]\nscenarios = [S2]\n");
  CHECK(c.scenarios.size() == 1);
  CHECK(c.scenarios[0] == Scenario::S2);
  CHECK(parse_scenario_list("s1,S1,S3") == std::vector<Scenario>{Scenario::S1, Scenario::S3});
  CHECK(scenario_name(Scenario::S4) == "S4");
  CHECK_THROWS(parse_scenario("S5"));
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("0..3") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(parse_seed_list("4") == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(parse_seed_list("[42]") == std::vector<std::uint64_t>{42});
  CHECK(parse_seed_list("7,1,9") == std::vector<std::uint64_t>{7, 1, 9});
  CHECK(parse_seed_list("[1, 2]") == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS(parse_seed_list("5..5"));
  CHECK_THROWS(parse_seed_list("x"));
  CHECK_THROWS(parse_seed_list(""));
}
