#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lylatherm/network.hpp"
#include "lylatherm/projection.hpp"
#include "lylatherm/thermo.hpp"

namespace lylatherm {

enum class Scenario { S1, S2, S3, S4 };

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);
std::vector<Scenario> parse_scenario_list(std::string_view list);

// "0..30" (half-open), "3" (count, i.e. 0..3), "1,5,9" or "[42]".
std::vector<std::uint64_t> parse_seed_list(std::string_view spec);

enum class InitMode {
  Shared,   // every run starts from the network drawn with init_seed
  PerSeed,  // each run draws its own initial network from its seed
};

enum class ReferenceMode {
  None,  // V_L proxy uses theta_ref = 0
  S1,    // theta_ref = final weights of a deterministic S1 run per initial network
};

/// Every tunable of one experiment. Defaults reproduce the benchmark study.
struct ExperimentConfig {
  // [simulation]
  double horizon = 30.0;
  double dt = 1e-3;
  int stride = 10;
  std::vector<Scenario> scenarios{Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4};
  std::vector<std::uint64_t> seeds{0};
  Vector initial_state = (Vector(5) << 0.0, -1.0, 3.0, -3.0, 3.0).finished();

  // [gains]
  Gains gains;

  // [network]
  int input_size = 5;
  int hidden_layers = 9;
  int hidden_width = 10;
  int output_size = 5;
  InitMode init_mode = InitMode::Shared;
  std::uint64_t init_seed = 2024;

  // [projection]
  ConvexBall ball;

  // [temperature]
  double temperature_scale = 9.0;
  double temperature_quadratic = 0.01;

  // [offtrajectory]
  int offtraj_count = 90;
  double offtraj_low = -0.5;
  double offtraj_high = 0.5;
  std::uint64_t offtraj_seed = 7;

  // [lyapunov]
  ReferenceMode reference = ReferenceMode::S1;
  double reference_horizon = 30.0;

  // [output]
  std::filesystem::path out_dir = "lylatherm_out";
  int workers = 1;
  bool write_csv = true;

  NetworkShape network_shape() const;
  // Law used by a scenario (S1 logs temperature with the S2 law).
  TemperatureLaw law_for(Scenario s) const;
  // Gains used by a scenario (S1 has k_T = 0).
  Gains gains_for(Scenario s) const;

  // Throws ConfigError with the offending key.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the INI-style config text:
///
///   # comment
///   [section]
///   key = value
///
/// Missing keys keep their defaults; unknown sections or keys are errors.
ExperimentConfig parse_config(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Inverse of parse_config: every key, one per line.
std::string render_config(const ExperimentConfig& config);

}  // namespace lylatherm
