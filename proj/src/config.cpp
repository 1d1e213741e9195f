#include "lylatherm/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lylatherm {

namespace {

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(s) + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"simulation.horizon", [](auto& c, auto v) { c.horizon = to_double(v); }},
      {"simulation.dt", [](auto& c, auto v) { c.dt = to_double(v); }},
      {"simulation.stride", [](auto& c, auto v) { c.stride = to_integer<int>(v); }},
      {"simulation.scenarios", [](auto& c, auto v) { c.scenarios = parse_scenario_list(v); }},
      {"simulation.seeds", [](auto& c, auto v) { c.seeds = parse_seed_list(v); }},
      {"simulation.initial_state",
       [](auto& c, auto v) {
         const auto parts = split(v, ',');
         Vector x(static_cast<Index>(parts.size()));
         for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<Index>(i)] = to_double(parts[i]);
         c.initial_state = x;
       }},
      {"gains.gamma", [](auto& c, auto v) { c.gains.gamma = to_double(v); }},
      {"gains.sigma", [](auto& c, auto v) { c.gains.sigma = to_double(v); }},
      {"gains.k_T", [](auto& c, auto v) { c.gains.k_T = to_double(v); }},
      {"gains.k_e", [](auto& c, auto v) { c.gains.k_e = to_double(v); }},
      {"network.input", [](auto& c, auto v) { c.input_size = to_integer<int>(v); }},
      {"network.hidden_layers", [](auto& c, auto v) { c.hidden_layers = to_integer<int>(v); }},
      {"network.width", [](auto& c, auto v) { c.hidden_width = to_integer<int>(v); }},
      {"network.output", [](auto& c, auto v) { c.output_size = to_integer<int>(v); }},
      {"network.init",
       [](auto& c, auto v) {
         v = trim(v);
         if (v == "shared") c.init_mode = InitMode::Shared;
         else if (v == "per_seed") c.init_mode = InitMode::PerSeed;
         else throw std::invalid_argument("expected shared or per_seed");
       }},
      {"network.init_seed", [](auto& c, auto v) { c.init_seed = to_integer<std::uint64_t>(v); }},
      {"projection.radius", [](auto& c, auto v) { c.ball.radius = to_double(v); }},
      {"projection.layer", [](auto& c, auto v) { c.ball.layer = to_double(v); }},
      {"temperature.scale", [](auto& c, auto v) { c.temperature_scale = to_double(v); }},
      {"temperature.quadratic", [](auto& c, auto v) { c.temperature_quadratic = to_double(v); }},
      {"offtrajectory.count", [](auto& c, auto v) { c.offtraj_count = to_integer<int>(v); }},
      {"offtrajectory.low", [](auto& c, auto v) { c.offtraj_low = to_double(v); }},
      {"offtrajectory.high", [](auto& c, auto v) { c.offtraj_high = to_double(v); }},
      {"offtrajectory.seed", [](auto& c, auto v) { c.offtraj_seed = to_integer<std::uint64_t>(v); }},
      {"lyapunov.reference",
       [](auto& c, auto v) {
         v = trim(v);
         if (v == "none") c.reference = ReferenceMode::None;
         else if (v == "s1" || v == "S1") c.reference = ReferenceMode::S1;
         else throw std::invalid_argument("expected none or s1");
       }},
      {"lyapunov.reference_horizon", [](auto& c, auto v) { c.reference_horizon = to_double(v); }},
      {"output.dir", [](auto& c, auto v) { c.out_dir = std::string(trim(v)); }},
      {"output.workers", [](auto& c, auto v) { c.workers = to_integer<int>(v); }},
      {"output.csv", [](auto& c, auto v) { c.write_csv = to_bool(v); }},
  };
  return table;
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
    case Scenario::S4: return "S4";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  name = trim(name);
  if (name == "S1" || name == "s1") return Scenario::S1;
  if (name == "S2" || name == "s2") return Scenario::S2;
  if (name == "S3" || name == "s3") return Scenario::S3;
  if (name == "S4" || name == "s4") return Scenario::S4;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::vector<Scenario> parse_scenario_list(std::string_view list) {
  list = trim(list);
  if (!list.empty() && list.front() == '[' && list.back() == ']') list = list.substr(1, list.size() - 2);
  std::vector<Scenario> out;
  for (auto part : split(list, ',')) {
    if (part.empty()) continue;
    const Scenario s = parse_scenario(part);
    bool seen = false;
    for (auto existing : out) seen |= existing == s;
    if (!seen) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty scenario list");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view spec) {
  spec = trim(spec);
  bool bracketed = false;
  if (!spec.empty() && spec.front() == '[' && spec.back() == ']') {
    spec = trim(spec.substr(1, spec.size() - 2));
    bracketed = true;
  }
  std::vector<std::uint64_t> seeds;
  if (const auto dots = spec.find(".."); dots != std::string_view::npos) {
    const auto lo = to_integer<std::uint64_t>(spec.substr(0, dots));
    const auto hi = to_integer<std::uint64_t>(spec.substr(dots + 2));
    for (auto s = lo; s < hi; ++s) seeds.push_back(s);
  } else if (!bracketed && spec.find(',') == std::string_view::npos) {
    const auto count = to_integer<std::uint64_t>(spec);
    for (std::uint64_t s = 0; s < count; ++s) seeds.push_back(s);
  } else {
    for (auto part : split(spec, ',')) {
      if (!part.empty()) seeds.push_back(to_integer<std::uint64_t>(part));
    }
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

NetworkShape ExperimentConfig::network_shape() const {
  return NetworkShape::uniform(input_size, hidden_layers, hidden_width, output_size);
}

TemperatureLaw ExperimentConfig::law_for(Scenario s) const {
  switch (s) {
    case Scenario::S1:
    case Scenario::S2:
      return TemperatureLaw::mu2(temperature_scale);
    case Scenario::S3:
      return TemperatureLaw::mu3(temperature_quadratic, temperature_scale);
    case Scenario::S4:
      return TemperatureLaw::mu4(temperature_quadratic, temperature_scale);
  }
  return TemperatureLaw::mu2(temperature_scale);
}

Gains ExperimentConfig::gains_for(Scenario s) const {
  Gains g = gains;
  if (s == Scenario::S1) g.k_T = 0.0;
  return g;
}

void ExperimentConfig::validate() const {
  auto fail = [](const char* key, const std::string& why) {
    throw ConfigError(std::string("invalid value for ") + key + ": " + why);
  };
  if (!(horizon >= 0.0)) fail("simulation.horizon", "must be >= 0");
  if (!(dt > 0.0)) fail("simulation.dt", "must be positive");
  if (stride < 1) fail("simulation.stride", "must be >= 1");
  if (scenarios.empty()) fail("simulation.scenarios", "empty");
  if (seeds.empty()) fail("simulation.seeds", "empty");
  if (initial_state.size() != output_size || initial_state.size() != 5) {
    fail("simulation.initial_state", "the benchmark plant has 5 states");
  }
  if (!(gains.gamma > 0.0)) fail("gains.gamma", "must be positive");
  if (!(gains.sigma > 0.0)) fail("gains.sigma", "must be positive");
  if (!(gains.k_T > 0.0)) fail("gains.k_T", "must be positive");
  if (!(gains.k_e > 0.0)) fail("gains.k_e", "must be positive");
  if (input_size != 5) fail("network.input", "the benchmark plant has 5 states");
  if (output_size != 5) fail("network.output", "the benchmark plant has 5 states");
  if (hidden_layers < 0) fail("network.hidden_layers", "must be >= 0");
  if (hidden_width < 1) fail("network.width", "must be >= 1");
  if (!(ball.radius > 0.0)) fail("projection.radius", "must be positive");
  if (!(ball.layer > 0.0)) fail("projection.layer", "must be positive");
  if (!(temperature_scale >= 0.0)) fail("temperature.scale", "must be >= 0");
  if (!(temperature_quadratic >= 0.0)) fail("temperature.quadratic", "must be >= 0");
  if (offtraj_count < 1) fail("offtrajectory.count", "must be >= 1");
  if (!(offtraj_low < offtraj_high)) fail("offtrajectory.low", "must be below offtrajectory.high");
  if (!(reference_horizon >= 0.0)) fail("lyapunov.reference_horizon", "must be >= 0");
  if (workers < 1) fail("output.workers", "must be >= 1");
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  ExperimentConfig config;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& [key, _] : setters()) known |= key.starts_with(section + ".");
      if (!known) throw ConfigError(where() + "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where() + "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError(where() + "unknown key '" + full + "'");
    try {
      it->second(config, value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(where() + "invalid value for " + full + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[simulation]\n"
      << "horizon = " << format_double(c.horizon) << '\n'
      << "dt = " << format_double(c.dt) << '\n'
      << "stride = " << c.stride << '\n'
      << "scenarios = ";
  for (std::size_t i = 0; i < c.scenarios.size(); ++i) out << (i ? "," : "") << scenario_name(c.scenarios[i]);
  out << "\nseeds = [";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
  out << ']';
  out << "\ninitial_state = ";
  for (Index i = 0; i < c.initial_state.size(); ++i) out << (i ? "," : "") << format_double(c.initial_state[i]);
  out << "\n\n[gains]\n"
      << "gamma = " << format_double(c.gains.gamma) << '\n'
      << "sigma = " << format_double(c.gains.sigma) << '\n'
      << "k_T = " << format_double(c.gains.k_T) << '\n'
      << "k_e = " << format_double(c.gains.k_e) << '\n'
      << "\n[network]\n"
      << "input = " << c.input_size << '\n'
      << "hidden_layers = " << c.hidden_layers << '\n'
      << "width = " << c.hidden_width << '\n'
      << "output = " << c.output_size << '\n'
      << "init = " << (c.init_mode == InitMode::Shared ? "shared" : "per_seed") << '\n'
      << "init_seed = " << c.init_seed << '\n'
      << "\n[projection]\n"
      << "radius = " << format_double(c.ball.radius) << '\n'
      << "layer = " << format_double(c.ball.layer) << '\n'
      << "\n[temperature]\n"
      << "scale = " << format_double(c.temperature_scale) << '\n'
      << "quadratic = " << format_double(c.temperature_quadratic) << '\n'
      << "\n[offtrajectory]\n"
      << "count = " << c.offtraj_count << '\n'
      << "low = " << format_double(c.offtraj_low) << '\n'
      << "high = " << format_double(c.offtraj_high) << '\n'
      << "seed = " << c.offtraj_seed << '\n'
      << "\n[lyapunov]\n"
      << "reference = " << (c.reference == ReferenceMode::S1 ? "s1" : "none") << '\n'
      << "reference_horizon = " << format_double(c.reference_horizon) << '\n'
      << "\n[output]\n"
      << "dir = " << c.out_dir.string() << '\n'
      << "workers = " << c.workers << '\n'
      << "csv = " << (c.write_csv ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace lylatherm
