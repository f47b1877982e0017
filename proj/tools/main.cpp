// Command-line front end: parse a config file, dispatch runs/sweeps, and
// emit CSV artifacts plus a run manifest. All randomness derives from the
// root seed, so identical (config, seed, version) reproduce every CSV
// byte-for-byte.

#include "rcsync/config.hpp"
#include "rcsync/csv.hpp"
#include "rcsync/experiments.hpp"
#include "rcsync/rng.hpp"
#include "rcsync/version.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rcsync;

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment configuration file")->required();
  cmd->add_option("--seed", args.seed, "root seed (overrides the config)");
  cmd->add_option("--out-dir", args.out_dir,
                  "output directory (default: $RCSYNC_OUT_DIR or ./out)");
  cmd->add_option("--threads", args.threads, "worker threads (0 = all available)");
}

fs::path resolve_out_dir(const CommonArgs& args) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("RCSYNC_OUT_DIR"); env && *env) return env;
  return "out";
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = parse_config(args.config_path);
  if (args.seed) cfg.root_seed = *args.seed;
  return cfg;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

class Manifest {
public:
  Manifest(std::string command, const ExperimentConfig& cfg, const fs::path& dir)
      : command_(std::move(command)), config_(serialize_config(cfg)),
        root_seed_(cfg.root_seed), dir_(dir), started_(timestamp_utc()) {}

  void add_output(const std::string& name) { outputs_.push_back(name); }
  void set_error(const std::string& message) { error_ = message; }

  void write() const {
    std::ofstream os(dir_ / "manifest.txt");
    os << "tool: " << kToolName << " " << kToolVersion << "\n";
    os << "command: " << command_ << "\n";
    os << "root_seed: " << root_seed_ << "\n";
    os << "started: " << started_ << "\n";
    os << "finished: " << timestamp_utc() << "\n";
    if (!error_.empty()) os << "error: " << error_ << "\n";
    os << "outputs:";
    for (const auto& o : outputs_) os << " " << o;
    os << "\n";
    os << "config:\n";
    std::istringstream cfg(config_);
    std::string line;
    while (std::getline(cfg, line)) os << "  " << line << "\n";
  }

private:
  std::string command_;
  std::string config_;
  std::uint64_t root_seed_;
  fs::path dir_;
  std::string started_;
  std::vector<std::string> outputs_;
  std::string error_;
};

template <typename WriteFn>
void emit(Manifest& manifest, const fs::path& dir, const std::string& name, WriteFn&& fn) {
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  fn(os);
  manifest.add_output(name);
}

int cmd_run(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  apply_threads(args.threads);
  const fs::path dir = resolve_out_dir(args);
  fs::create_directories(dir);
  Manifest manifest("run", cfg, dir);
  try {
    const RunArtifacts art = run_task(cfg, cfg.root_seed);
    std::vector<MetricRecord> records{art.record};
    emit(manifest, dir, "records.csv", [&](std::ostream& os) { write_records_csv(os, records); });
    emit(manifest, dir, "summary.csv",
         [&](std::ostream& os) { write_summary_csv(os, aggregate(records)); });
    emit(manifest, dir, "mfnn.csv", [&](std::ostream& os) { write_mfnn_csv(os, art.mfnn); });
    emit(manifest, dir, "replica.csv", [&](std::ostream& os) {
      write_replica_csv(os, art.replica, cfg.t_train.first, cfg.tau);
    });
    manifest.write();
    std::cout << "run: test_rmse=" << fmt17(art.record.test_rmse)
              << " inverse_mfnn=" << fmt17(art.record.inverse_mfnn)
              << " replica_converged=" << (art.record.replica_converged ? "true" : "false")
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const CommonArgs& args, const std::string& param_name,
              std::vector<double> values) {
  const ExperimentConfig cfg = load_config(args);
  apply_threads(args.threads);

  SweepParam param;
  if (param_name == "spectral_radius") param = SweepParam::SpectralRadius;
  else if (param_name == "input_scaling") param = SweepParam::InputScaling;
  else {
    std::cerr << "error: --param must be spectral_radius or input_scaling\n";
    return 1;
  }
  if (values.empty()) values = default_sweep_values(param);

  const fs::path dir = resolve_out_dir(args);
  fs::create_directories(dir);
  Manifest manifest("sweep --param " + param_name, cfg, dir);
  try {
    const auto records = sweep(cfg, param, values);
    emit(manifest, dir, "records.csv", [&](std::ostream& os) { write_records_csv(os, records); });
    emit(manifest, dir, "summary.csv",
         [&](std::ostream& os) { write_summary_csv(os, aggregate(records, param_name)); });
    manifest.write();
    int failed = 0;
    for (const auto& r : records) failed += r.ok ? 0 : 1;
    std::cout << "sweep: " << records.size() << " runs, " << failed << " failed\n";
    return 0;
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_ergodicity(const CommonArgs& args, int n_fresh) {
  const ExperimentConfig cfg = load_config(args);
  apply_threads(args.threads);
  const fs::path dir = resolve_out_dir(args);
  fs::create_directories(dir);
  Manifest manifest("ergodicity", cfg, dir);
  try {
    const ErgodicityReport report = ergodicity_check(cfg, n_fresh);
    emit(manifest, dir, "ergodicity.csv",
         [&](std::ostream& os) { write_ergodicity_csv(os, report); });
    manifest.write();
    std::cout << "ergodicity: " << (report.within_band ? "ok" : "outside band") << " ("
              << report.ratios.size() << " fresh trajectories)\n";
    return 0;
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_replica(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  apply_threads(args.threads);
  const fs::path dir = resolve_out_dir(args);
  fs::create_directories(dir);
  Manifest manifest("replica", cfg, dir);
  try {
    const RunArtifacts art = run_task(cfg, cfg.root_seed);
    emit(manifest, dir, "replica.csv", [&](std::ostream& os) {
      write_replica_csv(os, art.replica, cfg.t_train.first, cfg.tau);
    });
    manifest.write();
    std::cout << "replica: converged="
              << (art.replica.converged ? "true" : "false");
    if (art.replica.convergence_time)
      std::cout << " at sample " << *art.replica.convergence_time;
    std::cout << "\n";
    return 0;
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_mfnn(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  apply_threads(args.threads);
  const fs::path dir = resolve_out_dir(args);
  fs::create_directories(dir);
  Manifest manifest("mfnn", cfg, dir);
  try {
    const RunArtifacts art = run_task(cfg, cfg.root_seed);
    emit(manifest, dir, "mfnn.csv", [&](std::ostream& os) { write_mfnn_csv(os, art.mfnn); });
    manifest.write();
    std::cout << "mfnn: median=" << fmt17(art.mfnn.aggregate)
              << " inverse=" << fmt17(art.mfnn.inverse_aggregate) << "\n";
    return 0;
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"reservoir computing and generalized synchronization laboratory"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, ergo_args, replica_args, mfnn_args;
  std::string sweep_param;
  std::vector<double> sweep_values;
  int n_fresh = 5;

  CLI::App* run = app.add_subcommand("run", "single observer or forecast run");
  add_common(run, run_args);

  CLI::App* sw = app.add_subcommand("sweep", "hyperparameter sweep with repetitions");
  add_common(sw, sweep_args);
  sw->add_option("--param", sweep_param, "spectral_radius or input_scaling")->required();
  sw->add_option("--values", sweep_values, "comma-separated sweep values")->delimiter(',');

  CLI::App* ergo = app.add_subcommand("ergodicity", "fixed readout on fresh trajectories");
  add_common(ergo, ergo_args);
  ergo->add_option("--fresh", n_fresh, "number of fresh trajectories");

  CLI::App* rep = app.add_subcommand("replica", "replica convergence test");
  add_common(rep, replica_args);

  CLI::App* mf = app.add_subcommand("mfnn", "per-sample MFNN over the predicting window");
  add_common(mf, mfnn_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sw->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values);
    if (ergo->parsed()) return cmd_ergodicity(ergo_args, n_fresh);
    if (rep->parsed()) return cmd_replica(replica_args);
    if (mf->parsed()) return cmd_mfnn(mfnn_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
