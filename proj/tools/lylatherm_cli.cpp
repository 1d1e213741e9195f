// Experiment driver: run scenario sweeps, re-summarize output directories,
// and dry-run config files.
//
// Exit codes: 0 success, 2 config/usage error, 3 at least one run diverged.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lylatherm/config.hpp"
#include "lylatherm/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

lylatherm::SummaryFormat parse_format(const std::string& name) {
  if (name == "text") return lylatherm::SummaryFormat::Text;
  if (name == "csv") return lylatherm::SummaryFormat::Csv;
  if (name == "jsonl" || name == "json-lines") return lylatherm::SummaryFormat::JsonLines;
  throw lylatherm::ConfigError("unknown format '" + name + "' (text, csv, jsonl)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic adaptive neural-network controller simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenarios;
  std::string seeds;
  int workers = 0;
  std::string out_dir;
  std::string format = "text";
  bool no_csv = false;

  auto* run_cmd = app.add_subcommand("run", "Run scenarios over a seed sweep");
  run_cmd->add_option("--config", config_path, "Config file (defaults apply when omitted)");
  run_cmd->add_option("--scenarios", scenarios, "Comma-separated subset of S1,S2,S3,S4");
  run_cmd->add_option("--seeds", seeds, "Seeds: 0..30 (half-open), a count, or a list 1,2,3");
  run_cmd->add_option("--workers", workers, "Parallel runs (OpenMP threads)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--format", format, "Summary format: text, csv, jsonl");
  run_cmd->add_flag("--no-csv", no_csv, "Skip per-run trajectory CSVs");

  std::string in_dir;
  auto* sum_cmd = app.add_subcommand("summarize", "Print the summary of a previous run directory");
  sum_cmd->add_option("--in", in_dir, "Output directory of a previous run")->required();
  sum_cmd->add_option("--format", format, "Summary format: text, csv, jsonl");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running");
  validate_cmd->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto summary_format = parse_format(format);

    if (*validate_cmd) {
      const auto config = lylatherm::load_config(config_path);
      std::cout << lylatherm::render_config(config);
      std::cout << "# config OK\n";
      return 0;
    }

    if (*sum_cmd) {
      const auto table = lylatherm::summarize_directory(in_dir);
      std::cout << lylatherm::print_summary(table, summary_format);
      return 0;
    }

    lylatherm::ExperimentConfig config;
    if (!config_path.empty()) config = lylatherm::load_config(config_path);
    try {
      if (!scenarios.empty()) config.scenarios = lylatherm::parse_scenario_list(scenarios);
      if (!seeds.empty()) config.seeds = lylatherm::parse_seed_list(seeds);
    } catch (const std::invalid_argument& e) {
      throw lylatherm::ConfigError(e.what());
    }
    if (workers > 0) config.workers = workers;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (no_csv) config.write_csv = false;
    config.validate();

    const auto result = lylatherm::run_experiment(config);
    std::cout << lylatherm::print_summary(result.table, summary_format);
    if (result.any_diverged) {
      std::cerr << "error: at least one run diverged; see " << (config.out_dir / "runs.csv").string() << '\n';
      return kExitDiverged;
    }
    return 0;
  } catch (const lylatherm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
