#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lylatherm/config.hpp"
#include "lylatherm/parallel.hpp"

namespace lylatherm {

// One line of runs.csv.
struct RunRecord {
  Scenario scenario = Scenario::S1;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::int64_t divergence_step = -1;
  double rms_tracking = 0.0;
  double rms_approx = 0.0;
  double rms_offtraj = 0.0;
  std::int64_t clips = 0;
  std::int64_t steps = 0;
  double sup_x_norm = 0.0;
  double sup_e_norm = 0.0;
  double temperature_early = 0.0;
  double temperature_late = 0.0;
};

RunRecord to_record(const RunOutcome& outcome);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct ScenarioSummary {
  Scenario scenario = Scenario::S1;
  int runs = 0;
  int diverged = 0;
  MeanStd rms_tracking;
  MeanStd rms_approx;
  MeanStd rms_offtraj;
  // 100 (S1 - Sk) / S1 on the means; NaN when S1 is absent.
  double improve_tracking = 0.0;
  double improve_approx = 0.0;
  double improve_offtraj = 0.0;
  std::int64_t clips = 0;
};

struct SummaryTable {
  std::vector<ScenarioSummary> rows;
  const ScenarioSummary* find(Scenario s) const;
};

double improvement_percent(double baseline, double value);

// Aggregates converged runs per scenario, rows ordered S1..S4.
SummaryTable summarize(std::span<const RunRecord> records);

enum class SummaryFormat { Text, Csv, JsonLines };

std::string print_summary(const SummaryTable& table, SummaryFormat format);
SummaryTable parse_summary_csv(std::string_view text);

std::string render_run_records(std::span<const RunRecord> records);
std::vector<RunRecord> parse_run_records(std::string_view text);

struct ExperimentResult {
  SummaryTable table;
  std::vector<RunRecord> records;
  bool any_diverged = false;
};

/// Runs every (seed, scenario) pair of the config and writes into out_dir:
/// one CSV per run (when enabled), runs.csv, summary.{txt,csv,jsonl} and the
/// effective config.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Rebuilds the summary from a previous run_experiment output directory.
SummaryTable summarize_directory(const std::filesystem::path& dir);

std::string run_csv_name(Scenario s, std::uint64_t seed);

}  // namespace lylatherm
