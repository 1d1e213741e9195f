#include "lylatherm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace lylatherm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_double(std::string_view s) {
  if (s == "nan" || s == "-nan") return kNaN;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty()) lines.erase(lines.begin());  // header
  return lines;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return {kNaN, kNaN};
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

std::string percent(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

std::string mean_pm_std(const MeanStd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f +/- %.4f", m.mean, m.std);
  return buf;
}

}  // namespace

const ScenarioSummary* SummaryTable::find(Scenario s) const {
  for (const auto& row : rows) {
    if (row.scenario == s) return &row;
  }
  return nullptr;
}

double improvement_percent(double baseline, double value) { return 100.0 * (baseline - value) / baseline; }

RunRecord to_record(const RunOutcome& o) {
  RunRecord r;
  r.scenario = o.job.scenario;
  r.seed = o.job.seed;
  r.diverged = o.diverged;
  r.divergence_step = o.divergence_step;
  r.rms_tracking = o.diverged ? kNaN : o.metrics.rms_tracking;
  r.rms_approx = o.diverged ? kNaN : o.metrics.rms_approx;
  r.rms_offtraj = o.diverged ? kNaN : o.metrics.rms_offtraj;
  r.clips = o.log.clip_count;
  r.steps = o.log.steps;
  r.sup_x_norm = o.log.sup_x_norm;
  r.sup_e_norm = o.log.sup_e_norm;
  r.temperature_early = o.diverged ? kNaN : o.temperature_early;
  r.temperature_late = o.diverged ? kNaN : o.temperature_late;
  return r;
}

SummaryTable summarize(std::span<const RunRecord> records) {
  std::map<Scenario, std::vector<const RunRecord*>> grouped;
  for (const auto& r : records) grouped[r.scenario].push_back(&r);

  SummaryTable table;
  for (const auto& [scenario, runs] : grouped) {
    ScenarioSummary row;
    row.scenario = scenario;
    row.runs = static_cast<int>(runs.size());
    std::vector<double> e, f, off;
    for (const RunRecord* r : runs) {
      row.clips += r->clips;
      if (r->diverged) {
        ++row.diverged;
        continue;
      }
      e.push_back(r->rms_tracking);
      f.push_back(r->rms_approx);
      off.push_back(r->rms_offtraj);
    }
    row.rms_tracking = mean_std(e);
    row.rms_approx = mean_std(f);
    row.rms_offtraj = mean_std(off);
    table.rows.push_back(row);
  }

  const ScenarioSummary* base = table.find(Scenario::S1);
  for (auto& row : table.rows) {
    if (base == nullptr) {
      row.improve_tracking = row.improve_approx = row.improve_offtraj = kNaN;
      continue;
    }
    row.improve_tracking = improvement_percent(base->rms_tracking.mean, row.rms_tracking.mean);
    row.improve_approx = improvement_percent(base->rms_approx.mean, row.rms_approx.mean);
    row.improve_offtraj = improvement_percent(base->rms_offtraj.mean, row.rms_offtraj.mean);
  }
  return table;
}

std::string print_summary(const SummaryTable& table, SummaryFormat format) {
  std::ostringstream out;
  switch (format) {
    case SummaryFormat::Text: {
      char line[512];
      std::snprintf(line, sizeof line, "%-8s %5s %8s  %-22s %-22s %-22s %9s %9s %9s %6s\n", "Scenario", "Runs",
                    "Diverged", "RMS ||e||", "RMS ||f-Phi||", "Off-traj RMS", "d||e||", "d||f-Phi||", "d(off)",
                    "Clips");
      out << line;
      for (const auto& r : table.rows) {
        std::snprintf(line, sizeof line, "%-8s %5d %8d  %-22s %-22s %-22s %9s %9s %9s %6lld\n",
                      std::string(scenario_name(r.scenario)).c_str(), r.runs, r.diverged,
                      mean_pm_std(r.rms_tracking).c_str(), mean_pm_std(r.rms_approx).c_str(),
                      mean_pm_std(r.rms_offtraj).c_str(), percent(r.improve_tracking).c_str(),
                      percent(r.improve_approx).c_str(), percent(r.improve_offtraj).c_str(),
                      static_cast<long long>(r.clips));
        out << line;
      }
      break;
    }
    case SummaryFormat::Csv:
      out << "scenario,runs,diverged,rms_e_mean,rms_e_std,rms_approx_mean,rms_approx_std,"
             "rms_offtraj_mean,rms_offtraj_std,improve_e_pct,improve_approx_pct,improve_offtraj_pct,clips\n";
      for (const auto& r : table.rows) {
        out << scenario_name(r.scenario) << ',' << r.runs << ',' << r.diverged << ',' << num(r.rms_tracking.mean)
            << ',' << num(r.rms_tracking.std) << ',' << num(r.rms_approx.mean) << ',' << num(r.rms_approx.std)
            << ',' << num(r.rms_offtraj.mean) << ',' << num(r.rms_offtraj.std) << ','
            << num(r.improve_tracking) << ',' << num(r.improve_approx) << ',' << num(r.improve_offtraj) << ','
            << r.clips << '\n';
      }
      break;
    case SummaryFormat::JsonLines:
      for (const auto& r : table.rows) {
        auto opt = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
        nlohmann::ordered_json j;
        j["scenario"] = scenario_name(r.scenario);
        j["runs"] = r.runs;
        j["diverged"] = r.diverged;
        j["rms_e"] = {{"mean", opt(r.rms_tracking.mean)}, {"std", opt(r.rms_tracking.std)}};
        j["rms_approx"] = {{"mean", opt(r.rms_approx.mean)}, {"std", opt(r.rms_approx.std)}};
        j["rms_offtraj"] = {{"mean", opt(r.rms_offtraj.mean)}, {"std", opt(r.rms_offtraj.std)}};
        j["improve_e_pct"] = opt(r.improve_tracking);
        j["improve_approx_pct"] = opt(r.improve_approx);
        j["improve_offtraj_pct"] = opt(r.improve_offtraj);
        j["clips"] = r.clips;
        out << j.dump() << '\n';
      }
      break;
  }
  return out.str();
}

SummaryTable parse_summary_csv(std::string_view text) {
  SummaryTable table;
  for (auto line : data_lines(text)) {
    const auto f = split_csv(line);
    if (f.size() != 13) throw std::invalid_argument("summary csv: expected 13 fields");
    ScenarioSummary r;
    r.scenario = parse_scenario(f[0]);
    r.runs = parse_int<int>(f[1]);
    r.diverged = parse_int<int>(f[2]);
    r.rms_tracking = {parse_double(f[3]), parse_double(f[4])};
    r.rms_approx = {parse_double(f[5]), parse_double(f[6])};
    r.rms_offtraj = {parse_double(f[7]), parse_double(f[8])};
    r.improve_tracking = parse_double(f[9]);
    r.improve_approx = parse_double(f[10]);
    r.improve_offtraj = parse_double(f[11]);
    r.clips = parse_int<std::int64_t>(f[12]);
    table.rows.push_back(r);
  }
  return table;
}

std::string render_run_records(std::span<const RunRecord> records) {
  std::ostringstream out;
  out << "scenario,seed,status,divergence_step,rms_e,rms_approx,rms_offtraj,clips,steps,sup_x_norm,sup_e_norm,"
         "T_early,T_late\n";
  for (const auto& r : records) {
    out << scenario_name(r.scenario) << ',' << r.seed << ',' << (r.diverged ? "diverged" : "ok") << ','
        << r.divergence_step << ',' << num(r.rms_tracking) << ',' << num(r.rms_approx) << ','
        << num(r.rms_offtraj) << ',' << r.clips << ',' << r.steps << ',' << num(r.sup_x_norm) << ','
        << num(r.sup_e_norm) << ',' << num(r.temperature_early) << ',' << num(r.temperature_late) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> parse_run_records(std::string_view text) {
  std::vector<RunRecord> records;
  for (auto line : data_lines(text)) {
    const auto f = split_csv(line);
    if (f.size() != 13) throw std::invalid_argument("runs csv: expected 13 fields");
    RunRecord r;
    r.scenario = parse_scenario(f[0]);
    r.seed = parse_int<std::uint64_t>(f[1]);
    if (f[2] != "ok" && f[2] != "diverged") throw std::invalid_argument("runs csv: bad status");
    r.diverged = f[2] == "diverged";
    r.divergence_step = parse_int<std::int64_t>(f[3]);
    r.rms_tracking = parse_double(f[4]);
    r.rms_approx = parse_double(f[5]);
    r.rms_offtraj = parse_double(f[6]);
    r.clips = parse_int<std::int64_t>(f[7]);
    r.steps = parse_int<std::int64_t>(f[8]);
    r.sup_x_norm = parse_double(f[9]);
    r.sup_e_norm = parse_double(f[10]);
    r.temperature_early = parse_double(f[11]);
    r.temperature_late = parse_double(f[12]);
    records.push_back(r);
  }
  return records;
}

std::string run_csv_name(Scenario s, std::uint64_t seed) {
  return std::string(scenario_name(s)) + "_seed" + std::to_string(seed) + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir / "config.ini", render_config(config));

  RandomSource offtraj_rng(config.offtraj_seed);
  const auto points = off_trajectory_points(config.offtraj_count, config.offtraj_low, config.offtraj_high, offtraj_rng);

  // Reference weights for the Lyapunov proxy: one per distinct initial network.
  std::map<std::uint64_t, Vector> references;
  if (config.reference == ReferenceMode::S1) {
    std::vector<std::uint64_t> keys;
    if (config.init_mode == InitMode::Shared) keys.push_back(config.seeds.front());
    else keys = config.seeds;
    std::vector<Vector> weights(keys.size());
    const auto n = static_cast<std::int64_t>(keys.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
    for (std::int64_t i = 0; i < n; ++i) weights[i] = reference_weights(config, keys[i]);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::string name = config.init_mode == InitMode::Shared
                                   ? std::string("reference_theta.csv")
                                   : "reference_theta_seed" + std::to_string(keys[i]) + ".csv";
      save_weights_csv(config.out_dir / name, weights[i]);
      references.emplace(keys[i], std::move(weights[i]));
    }
  }

  std::vector<RunJob> jobs;
  for (auto seed : config.seeds) {
    for (auto scenario : config.scenarios) {
      RunJob job{scenario, seed, nullptr};
      if (!references.empty()) {
        job.reference = &references.at(config.init_mode == InitMode::Shared ? config.seeds.front() : seed);
      }
      jobs.push_back(job);
    }
  }

  SweepOptions options;
  options.keep_rows = false;
  if (config.write_csv) {
    options.on_complete = [&](const RunOutcome& o) {
      std::ofstream out(config.out_dir / run_csv_name(o.job.scenario, o.job.seed));
      write_log_csv(o.log, out);
    };
  }
  const auto outcomes = config.workers > 1 ? run_sweep_parallel(config, jobs, points, config.workers, options)
                                           : run_sweep_serial(config, jobs, points, options);

  ExperimentResult result;
  for (const auto& o : outcomes) {
    result.records.push_back(to_record(o));
    result.any_diverged = result.any_diverged || o.diverged;
  }
  result.table = summarize(result.records);

  write_file(config.out_dir / "runs.csv", render_run_records(result.records));
  write_file(config.out_dir / "summary.csv", print_summary(result.table, SummaryFormat::Csv));
  write_file(config.out_dir / "summary.jsonl", print_summary(result.table, SummaryFormat::JsonLines));
  write_file(config.out_dir / "summary.txt", print_summary(result.table, SummaryFormat::Text));
  return result;
}

SummaryTable summarize_directory(const std::filesystem::path& dir) {
  const auto records = parse_run_records(read_file(dir / "runs.csv"));
  return summarize(records);
}

}  // namespace lylatherm
