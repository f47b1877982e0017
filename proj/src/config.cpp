#include "rcsync/config.hpp"

#include "rcsync/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace rcsync {

namespace {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const KeyValue& kv) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(kv.value, &used);
  } catch (const std::exception&) {
    fail(kv.line, "malformed number for key '" + kv.key + "': " + kv.value);
  }
  if (used != kv.value.size())
    fail(kv.line, "trailing characters after number for key '" + kv.key + "'");
  return v;
}

long long parse_int(const KeyValue& kv) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(kv.value, &used);
  } catch (const std::exception&) {
    fail(kv.line, "malformed integer for key '" + kv.key + "': " + kv.value);
  }
  if (used != kv.value.size())
    fail(kv.line, "trailing characters after integer for key '" + kv.key + "'");
  return v;
}

std::uint64_t parse_u64(const KeyValue& kv) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(kv.value, &used);
  } catch (const std::exception&) {
    fail(kv.line, "malformed seed for key '" + kv.key + "': " + kv.value);
  }
  if (used != kv.value.size())
    fail(kv.line, "trailing characters after integer for key '" + kv.key + "'");
  return v;
}

const std::vector<std::string> kKnownKeys = {
    "source",           "task",
    "horizon_steps",    "d_r",
    "spectral_radius",  "input_scaling",
    "bias",             "avg_degree",
    "tau",              "substeps",
    "t_train_start",    "t_train_end",
    "t_test_start",     "t_test_end",
    "washout_fraction", "lambda",
    "repetitions",      "theiler_window",
    "mfnn_subsample",   "replica_threshold",
    "source_washout_time", "seed",
};

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::vector<KeyValue> pairs;
  {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      KeyValue kv;
      kv.key = trim(line.substr(0, eq));
      kv.value = trim(line.substr(eq + 1));
      kv.line = line_no;
      if (kv.key.empty()) fail(line_no, "empty key");
      if (kv.value.empty()) fail(line_no, "empty value for key '" + kv.key + "'");
      if (std::find(kKnownKeys.begin(), kKnownKeys.end(), kv.key) == kKnownKeys.end())
        fail(line_no, "unknown key '" + kv.key + "'");
      for (const auto& prev : pairs)
        if (prev.key == kv.key)
          fail(line_no, "duplicate key '" + kv.key + "' (first set on line " +
                            std::to_string(prev.line) + ")");
      pairs.push_back(std::move(kv));
    }
  }

  // The source preset supplies every default; explicit keys override it.
  ExperimentConfig cfg = ExperimentConfig::lorenz_defaults();
  for (const auto& kv : pairs) {
    if (kv.key != "source") continue;
    if (kv.value == "lorenz") cfg = ExperimentConfig::lorenz_defaults();
    else if (kv.value == "roessler") cfg = ExperimentConfig::roessler_defaults();
    else fail(kv.line, "source must be 'lorenz' or 'roessler'");
  }

  for (const auto& kv : pairs) {
    if (kv.key == "source") continue;
    if (kv.key == "task") {
      if (kv.value == "observer") cfg.task = TaskKind::Observer;
      else if (kv.value == "forecast") cfg.task = TaskKind::Forecast;
      else fail(kv.line, "task must be 'observer' or 'forecast'");
    } else if (kv.key == "horizon_steps") cfg.horizon_steps = static_cast<int>(parse_int(kv));
    else if (kv.key == "d_r") cfg.reservoir.d_r = static_cast<int>(parse_int(kv));
    else if (kv.key == "spectral_radius") cfg.reservoir.spectral_radius = parse_double(kv);
    else if (kv.key == "input_scaling") cfg.reservoir.input_scaling = parse_double(kv);
    else if (kv.key == "bias") cfg.reservoir.bias = parse_double(kv);
    else if (kv.key == "avg_degree") cfg.reservoir.avg_degree = static_cast<int>(parse_int(kv));
    else if (kv.key == "tau") cfg.tau = parse_double(kv);
    else if (kv.key == "substeps") cfg.substeps = static_cast<int>(parse_int(kv));
    else if (kv.key == "t_train_start") cfg.t_train.first = parse_double(kv);
    else if (kv.key == "t_train_end") cfg.t_train.second = parse_double(kv);
    else if (kv.key == "t_test_start") cfg.t_test.first = parse_double(kv);
    else if (kv.key == "t_test_end") cfg.t_test.second = parse_double(kv);
    else if (kv.key == "washout_fraction") cfg.washout_fraction = parse_double(kv);
    else if (kv.key == "lambda") cfg.lambda = parse_double(kv);
    else if (kv.key == "repetitions") cfg.repetitions = static_cast<int>(parse_int(kv));
    else if (kv.key == "theiler_window") cfg.theiler_window = static_cast<int>(parse_int(kv));
    else if (kv.key == "mfnn_subsample") cfg.mfnn_subsample = static_cast<int>(parse_int(kv));
    else if (kv.key == "replica_threshold") cfg.replica_threshold = parse_double(kv);
    else if (kv.key == "source_washout_time") cfg.source_washout_time = parse_double(kv);
    else if (kv.key == "seed") cfg.root_seed = parse_u64(kv);
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "source = " << (cfg.source.kind == SystemKind::Roessler ? "roessler" : "lorenz")
     << "\n";
  os << "task = " << (cfg.task == TaskKind::Forecast ? "forecast" : "observer") << "\n";
  os << "horizon_steps = " << cfg.horizon_steps << "\n";
  os << "d_r = " << cfg.reservoir.d_r << "\n";
  os << "spectral_radius = " << fmt17(cfg.reservoir.spectral_radius) << "\n";
  os << "input_scaling = " << fmt17(cfg.reservoir.input_scaling) << "\n";
  os << "bias = " << fmt17(cfg.reservoir.bias) << "\n";
  os << "avg_degree = " << cfg.reservoir.avg_degree << "\n";
  os << "tau = " << fmt17(cfg.tau) << "\n";
  os << "substeps = " << cfg.substeps << "\n";
  os << "t_train_start = " << fmt17(cfg.t_train.first) << "\n";
  os << "t_train_end = " << fmt17(cfg.t_train.second) << "\n";
  os << "t_test_start = " << fmt17(cfg.t_test.first) << "\n";
  os << "t_test_end = " << fmt17(cfg.t_test.second) << "\n";
  os << "washout_fraction = " << fmt17(cfg.washout_fraction) << "\n";
  os << "lambda = " << fmt17(cfg.lambda) << "\n";
  os << "repetitions = " << cfg.repetitions << "\n";
  os << "theiler_window = " << cfg.theiler_window << "\n";
  os << "mfnn_subsample = " << cfg.mfnn_subsample << "\n";
  os << "replica_threshold = " << fmt17(cfg.replica_threshold) << "\n";
  os << "source_washout_time = " << fmt17(cfg.source_washout_time) << "\n";
  os << "seed = " << cfg.root_seed << "\n";
  return os.str();
}

} // namespace rcsync
