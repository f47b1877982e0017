#pragma once

#include "rcsync/dynamics.hpp"
#include "rcsync/readout.hpp"
#include "rcsync/reservoir.hpp"
#include "rcsync/syncmetrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rcsync {

enum class TaskKind { Observer, Forecast };
enum class SweepParam { SpectralRadius, InputScaling };

/// Everything needed to reproduce one experiment bit-exactly.
struct ExperimentConfig {
  SourceSystemSpec source = SourceSystemSpec::make_lorenz();
  TaskKind task = TaskKind::Observer;
  int horizon_steps = 5; // Forecast only: y(t) = u(t + horizon_steps * tau)
  ReservoirSpec reservoir{};
  double tau = 0.05;
  int substeps = 10;
  std::pair<double, double> t_train{-100.0, 0.0};
  std::pair<double, double> t_test{0.0, 80.0};
  double washout_fraction = 0.1;
  double lambda = 1e-6;
  int repetitions = 10;
  std::uint64_t root_seed = 1;
  int theiler_window = 10;
  int mfnn_subsample = 1;
  double replica_threshold = 1e-6;
  double source_washout_time = 100.0;

  Eigen::Index train_steps() const;
  Eigen::Index test_steps() const;
  void validate() const;

  static ExperimentConfig lorenz_defaults();
  static ExperimentConfig roessler_defaults();
};

/// Per-run result bundle; `ok == false` rows carry the failure message and
/// the hyperparameters that produced it.
struct MetricRecord {
  int value_index = 0;
  int repetition = 0;
  std::uint64_t run_seed = 0;
  bool ok = true;
  std::string error;

  double spectral_radius = 0.0;
  double input_scaling = 0.0;
  int d_r = 0;
  int avg_degree = 0;
  double bias = 0.0;
  double lambda = 0.0;

  double train_rmse = 0.0;
  Vec test_rmse_per_coord;
  double test_rmse = 0.0;
  double mfnn_aggregate = 0.0;
  double mfnn_mean = 0.0;
  double inverse_mfnn = 0.0;
  bool replica_converged = false;
  std::optional<int> replica_convergence_time;
};

/// Full pipeline state of one run, kept around for follow-up evaluations
/// (fresh-trajectory checks, noise injection) and for artifact output.
struct RunArtifacts {
  ExperimentConfig cfg;
  MetricRecord record;
  Reservoir reservoir;
  Trajectory trajectory; // training and predicting windows, one piece
  Vec u;                 // measured input series
  StateMatrix states;    // driven states for the whole series
  Eigen::Index n_train = 0;      // column index of the last training sample
  Eigen::Index washout_cols = 0; // training columns discarded before fitting
  Mat W_out;
  FitReport fit;
  MfnnResult mfnn;
  ReplicaReport replica;
};

/// Washout the source, integrate across both windows, listen, fit the
/// readout on the retained training states, continue driving through the
/// predicting window, and compute RMSE / MFNN / replica metrics.
RunArtifacts run_task(const ExperimentConfig& cfg, std::uint64_t run_seed);

MetricRecord run_observer(const ExperimentConfig& cfg);
MetricRecord run_forecast(const ExperimentConfig& cfg);

/// Forecast targets: column i equals u[i + horizon].
Mat shifted_targets(const Vec& u, int horizon);

/// Test RMSE of an already-trained run on a fresh source trajectory
/// (fresh listening from r0 = 0, same reservoir and readout).
double evaluate_on_trajectory(const RunArtifacts& trained, const Trajectory& fresh);

std::vector<double> default_sweep_values(SweepParam param);

/// One run per (value, repetition) with per-run seeds derived from the
/// root seed; failures are recorded as failed rows and the sweep continues.
/// Runs execute in parallel; the result order is (value, repetition).
std::vector<MetricRecord> sweep(const ExperimentConfig& cfg, SweepParam param,
                                const std::vector<double>& values);

struct ErgodicityReport {
  double original_rmse = 0.0;
  std::vector<double> fresh_rmse;
  std::vector<double> ratios; // fresh / original
  double band_lo = 0.5;
  double band_hi = 2.0;
  bool within_band = false; // every ratio inside [band_lo, band_hi]
};

/// Train on one trajectory, evaluate the fixed readout on fresh
/// trajectories from new random initial conditions.
ErgodicityReport ergodicity_check(const ExperimentConfig& cfg, int n_fresh,
                                  double band_lo = 0.5, double band_hi = 2.0);

struct NoiseBoundReport {
  int n_draws = 0;
  int n_satisfied = 0;
  double relative_noise = 0.0;
  std::vector<double> measured; // max_t ||W_out eta(t)|| per draw
  std::vector<double> bound;    // noise_error_bound at max_t ||eta(t)||
};

/// Inject bounded input noise over the predicting window and compare the
/// measured synchronization error against the readout singular-value bound.
NoiseBoundReport noise_bound_check(const ExperimentConfig& cfg, int n_draws,
                                   double relative_noise = 0.01);

struct Stats {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SummaryRow {
  std::string param;
  bool has_value = false;
  double value = 0.0;
  int n_ok = 0;
  int n_failed = 0;
  Stats test_rmse;
  Stats inverse_mfnn;
};

/// Per-value summary over repetitions; `param_name` selects which
/// hyperparameter is reported in the value column ("spectral_radius",
/// "input_scaling", or "" for none).
std::vector<SummaryRow> aggregate(const std::vector<MetricRecord>& records,
                                  const std::string& param_name = "");

void write_records_csv(std::ostream& os, const std::vector<MetricRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_ergodicity_csv(std::ostream& os, const ErgodicityReport& report);

} // namespace rcsync
