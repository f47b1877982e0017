#include "rcsync/experiments.hpp"

#include "rcsync/csv.hpp"
#include "rcsync/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rcsync {

namespace {

Stats stats_of(std::vector<double> v) {
  Stats s;
  if (v.empty()) {
    s.mean = s.median = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  const std::size_t n = v.size();
  s.median = (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(n);
  return s;
}

std::string opt_field(double x) {
  return std::isfinite(x) ? fmt17(x) : std::string();
}

} // namespace

Eigen::Index ExperimentConfig::train_steps() const {
  return static_cast<Eigen::Index>(std::llround((t_train.second - t_train.first) / tau));
}

Eigen::Index ExperimentConfig::test_steps() const {
  return static_cast<Eigen::Index>(std::llround((t_test.second - t_test.first) / tau));
}

void ExperimentConfig::validate() const {
  source.validate();
  reservoir.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!(t_train.second > t_train.first))
    throw std::invalid_argument("training window must have positive length");
  if (!(t_test.second > t_test.first))
    throw std::invalid_argument("predicting window must have positive length");
  if (t_test.first != t_train.second)
    throw std::invalid_argument("predicting window must start where the training window ends");
  if (!(washout_fraction >= 0.0 && washout_fraction < 1.0))
    throw std::invalid_argument("washout_fraction must be in [0, 1)");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (horizon_steps < 0) throw std::invalid_argument("horizon_steps must be >= 0");
  if (theiler_window < 0) throw std::invalid_argument("theiler_window must be >= 0");
  if (mfnn_subsample < 1) throw std::invalid_argument("mfnn_subsample must be >= 1");
  if (!(replica_threshold > 0.0)) throw std::invalid_argument("replica_threshold must be positive");
  if (!(source_washout_time >= 0.0))
    throw std::invalid_argument("source_washout_time must be >= 0");
  if (train_steps() < 1 || test_steps() < 1)
    throw std::invalid_argument("windows must contain at least one sampling step");
}

ExperimentConfig ExperimentConfig::lorenz_defaults() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::roessler_defaults() {
  ExperimentConfig cfg;
  cfg.source = SourceSystemSpec::make_roessler();
  cfg.tau = 0.5;
  cfg.substeps = 100;
  cfg.t_train = {-200.0, 0.0};
  cfg.t_test = {0.0, 160.0};
  return cfg;
}

Mat shifted_targets(const Vec& u, int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (horizon >= u.size())
    throw std::invalid_argument("horizon exceeds the input series length");
  Mat y(1, u.size() - horizon);
  y.row(0) = u.segment(horizon, u.size() - horizon);
  return y;
}

RunArtifacts run_task(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  cfg.validate();

  RunArtifacts art;
  art.cfg = cfg;
  MetricRecord& rec = art.record;
  rec.run_seed = run_seed;
  rec.spectral_radius = cfg.reservoir.spectral_radius;
  rec.input_scaling = cfg.reservoir.input_scaling;
  rec.d_r = cfg.reservoir.d_r;
  rec.avg_degree = cfg.reservoir.avg_degree;
  rec.bias = cfg.reservoir.bias;
  rec.lambda = cfg.lambda;

  const Eigen::Index n_train = cfg.train_steps();
  const Eigen::Index n_test = cfg.test_steps();
  const Eigen::Index total = n_train + n_test;

  // Source: random initial condition washed onto the attractor, then one
  // trajectory spanning both windows.
  const int d = cfg.source.dimension();
  Rng src_rng(derive_seed(run_seed, kStreamSourceInit));
  Vec s0(d);
  for (int i = 0; i < d; ++i) s0[i] = src_rng.uniform(-10.0, 10.0);
  const Vec on_attractor =
      washout_source(cfg.source, s0, cfg.source_washout_time, cfg.tau, cfg.substeps);
  art.trajectory =
      integrate(cfg.source, on_attractor, cfg.tau, total, cfg.substeps, cfg.t_train.first);
  art.u = measure(art.trajectory, {0}).col(0);

  // Reservoir, driven across the whole series in one pass: the predicting
  // window continues from the training-phase terminal state by
  // construction, and the dynamics never depend on the fit.
  ReservoirSpec rspec = cfg.reservoir;
  rspec.seed = derive_seed(run_seed, kStreamReservoir);
  art.reservoir = build_reservoir(rspec);
  const Vec r0 = Vec::Zero(rspec.d_r);
  art.states = drive(art.reservoir, art.u, r0);
  art.n_train = n_train;

  const Eigen::Index train_cols = n_train + 1;
  art.washout_cols = static_cast<Eigen::Index>(
      std::floor(cfg.washout_fraction * static_cast<double>(train_cols)));

  Eigen::Index fit_begin = art.washout_cols;
  Eigen::Index fit_end = n_train;   // inclusive
  Eigen::Index eval_begin = n_train + 1;
  Eigen::Index eval_end = total;    // inclusive

  Mat targets; // d_y x (columns aligned with the driven series)
  if (cfg.task == TaskKind::Observer) {
    std::vector<int> coords;
    for (int c = 1; c < d; ++c) coords.push_back(c);
    if (coords.empty()) throw std::invalid_argument("observer task needs dimension >= 2");
    targets = measure(art.trajectory, coords).transpose();
  } else {
    const int h = cfg.horizon_steps;
    fit_end -= h;
    eval_end -= h;
    if (fit_end < fit_begin)
      throw std::invalid_argument("forecast horizon exceeds the training window");
    if (eval_end < eval_begin)
      throw std::invalid_argument("forecast horizon exceeds the predicting window");
    targets = shifted_targets(art.u, h);
  }

  RidgeFit fit = fit_ridge(art.states.middleCols(fit_begin, fit_end - fit_begin + 1),
                           targets.middleCols(fit_begin, fit_end - fit_begin + 1),
                           cfg.lambda);
  art.W_out = fit.W_out;
  art.fit = fit.report;
  rec.train_rmse = fit.report.train_rmse;

  const Mat y_hat =
      predict(art.W_out, art.states.middleCols(eval_begin, eval_end - eval_begin + 1));
  const RmseResult rm =
      rmse(targets.middleCols(eval_begin, eval_end - eval_begin + 1), y_hat);
  rec.test_rmse_per_coord = rm.per_coordinate;
  rec.test_rmse = rm.mean;

  // MFNN between the source states and the reservoir states over the full
  // predicting window; identical across tasks with matched seeds.
  const Mat drive_states = art.trajectory.states.middleRows(n_train + 1, n_test);
  const Mat response_states = art.states.middleCols(n_train + 1, n_test).transpose();
  art.mfnn = mfnn(drive_states, response_states, cfg.theiler_window, cfg.mfnn_subsample);
  rec.mfnn_aggregate = art.mfnn.aggregate;
  rec.mfnn_mean = art.mfnn.mean;
  rec.inverse_mfnn = art.mfnn.inverse_aggregate;

  // Replica test on the training input.
  Rng rep_rng(derive_seed(run_seed, kStreamReplicaInit));
  Vec r0_b(rspec.d_r);
  for (Eigen::Index i = 0; i < r0_b.size(); ++i) r0_b[i] = rep_rng.uniform(-1.0, 1.0);
  art.replica =
      replica_test(art.reservoir, art.u.head(train_cols), r0, r0_b, cfg.replica_threshold);
  rec.replica_converged = art.replica.converged;
  rec.replica_convergence_time = art.replica.convergence_time;

  return art;
}

MetricRecord run_observer(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.task = TaskKind::Observer;
  return run_task(c, c.root_seed).record;
}

MetricRecord run_forecast(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.task = TaskKind::Forecast;
  return run_task(c, c.root_seed).record;
}

double evaluate_on_trajectory(const RunArtifacts& trained, const Trajectory& fresh) {
  const ExperimentConfig& cfg = trained.cfg;
  if (fresh.samples() != trained.trajectory.samples() || fresh.dim() != trained.trajectory.dim())
    throw std::invalid_argument("fresh trajectory shape differs from the training one");

  const Vec u = measure(fresh, {0}).col(0);
  const Vec r0 = Vec::Zero(trained.reservoir.spec.d_r);
  const StateMatrix states = drive(trained.reservoir, u, r0);

  const Eigen::Index n_train = trained.n_train;
  const Eigen::Index total = fresh.samples() - 1;
  Eigen::Index eval_begin = n_train + 1;
  Eigen::Index eval_end = total;

  Mat targets;
  if (cfg.task == TaskKind::Observer) {
    std::vector<int> coords;
    for (int c = 1; c < fresh.dim(); ++c) coords.push_back(c);
    targets = measure(fresh, coords).transpose();
  } else {
    eval_end -= cfg.horizon_steps;
    targets = shifted_targets(u, cfg.horizon_steps);
  }

  const Mat y_hat =
      predict(trained.W_out, states.middleCols(eval_begin, eval_end - eval_begin + 1));
  return rmse(targets.middleCols(eval_begin, eval_end - eval_begin + 1), y_hat).mean;
}

std::vector<double> default_sweep_values(SweepParam param) {
  if (param == SweepParam::SpectralRadius)
    return {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.4, 2.0, 3.0};
  return {0.01, 0.03, 0.1, 0.3, 1.0, 3.0};
}

std::vector<MetricRecord> sweep(const ExperimentConfig& cfg, SweepParam param,
                                const std::vector<double>& values) {
  cfg.validate();
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  for (double v : values)
    if (!(v > 0.0)) throw std::invalid_argument("sweep values must be positive");

  const int reps = cfg.repetitions;
  const int n_runs = static_cast<int>(values.size()) * reps;
  std::vector<MetricRecord> out(static_cast<std::size_t>(n_runs));

#pragma omp parallel for schedule(dynamic)
  for (int flat = 0; flat < n_runs; ++flat) {
    const int value_index = flat / reps;
    const int repetition = flat % reps;

    ExperimentConfig run_cfg = cfg;
    if (param == SweepParam::SpectralRadius)
      run_cfg.reservoir.spectral_radius = values[static_cast<std::size_t>(value_index)];
    else
      run_cfg.reservoir.input_scaling = values[static_cast<std::size_t>(value_index)];

    const std::uint64_t seed = derive_seed(cfg.root_seed, static_cast<std::uint64_t>(flat));
    MetricRecord rec;
    try {
      rec = run_task(run_cfg, seed).record;
    } catch (const std::exception& e) {
      rec = MetricRecord{};
      rec.ok = false;
      rec.error = e.what();
      rec.run_seed = seed;
      rec.spectral_radius = run_cfg.reservoir.spectral_radius;
      rec.input_scaling = run_cfg.reservoir.input_scaling;
      rec.d_r = run_cfg.reservoir.d_r;
      rec.avg_degree = run_cfg.reservoir.avg_degree;
      rec.bias = run_cfg.reservoir.bias;
      rec.lambda = run_cfg.lambda;
    }
    rec.value_index = value_index;
    rec.repetition = repetition;
    out[static_cast<std::size_t>(flat)] = std::move(rec);
  }
  return out;
}

ErgodicityReport ergodicity_check(const ExperimentConfig& cfg, int n_fresh,
                                  double band_lo, double band_hi) {
  if (n_fresh < 1) throw std::invalid_argument("n_fresh must be >= 1");
  const RunArtifacts base = run_task(cfg, cfg.root_seed);

  ErgodicityReport report;
  report.original_rmse = base.record.test_rmse;
  report.band_lo = band_lo;
  report.band_hi = band_hi;
  report.within_band = true;

  const Eigen::Index total = cfg.train_steps() + cfg.test_steps();
  const int d = cfg.source.dimension();
  const std::uint64_t fresh_base = derive_seed(cfg.root_seed, kStreamFreshTraj);
  for (int j = 0; j < n_fresh; ++j) {
    Rng rng(derive_seed(fresh_base, static_cast<std::uint64_t>(j)));
    Vec s0(d);
    for (int i = 0; i < d; ++i) s0[i] = rng.uniform(-10.0, 10.0);
    const Vec on_attractor =
        washout_source(cfg.source, s0, cfg.source_washout_time, cfg.tau, cfg.substeps);
    const Trajectory fresh =
        integrate(cfg.source, on_attractor, cfg.tau, total, cfg.substeps, cfg.t_train.first);

    const double fresh_rmse = evaluate_on_trajectory(base, fresh);
    const double ratio = fresh_rmse / report.original_rmse;
    report.fresh_rmse.push_back(fresh_rmse);
    report.ratios.push_back(ratio);
    if (!(ratio >= band_lo && ratio <= band_hi)) report.within_band = false;
  }
  return report;
}

NoiseBoundReport noise_bound_check(const ExperimentConfig& cfg, int n_draws,
                                   double relative_noise) {
  if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
  if (!(relative_noise > 0.0)) throw std::invalid_argument("relative_noise must be positive");

  const RunArtifacts base = run_task(cfg, cfg.root_seed);
  const Eigen::Index n_train = base.n_train;
  const Eigen::Index n_test = cfg.test_steps();

  const Vec u_test = base.u.segment(n_train + 1, n_test);
  const Vec terminal = base.states.col(n_train);
  const Mat clean = base.states.middleCols(n_train + 1, n_test);

  const double u_mean = base.u.mean();
  const double u_std =
      std::sqrt((base.u.array() - u_mean).square().sum() / static_cast<double>(base.u.size()));
  const double amplitude = relative_noise * u_std;

  NoiseBoundReport report;
  report.n_draws = n_draws;
  report.relative_noise = relative_noise;

  const std::uint64_t noise_base = derive_seed(cfg.root_seed, kStreamNoise);
  for (int i = 0; i < n_draws; ++i) {
    Rng rng(derive_seed(noise_base, static_cast<std::uint64_t>(i)));
    Vec noisy = u_test;
    for (Eigen::Index t = 0; t < noisy.size(); ++t)
      noisy[t] += rng.uniform(-amplitude, amplitude);

    const StateMatrix perturbed = drive(base.reservoir, noisy, terminal);
    double eta_max = 0.0;
    double measured = 0.0;
    for (Eigen::Index t = 0; t < n_test; ++t) {
      const Vec eta = perturbed.col(t) - clean.col(t);
      eta_max = std::max(eta_max, eta.norm());
      measured = std::max(measured, (base.W_out * eta).norm());
    }
    const double bnd = noise_error_bound(base.W_out, eta_max);
    report.measured.push_back(measured);
    report.bound.push_back(bnd);
    if (measured <= bnd) ++report.n_satisfied;
  }
  return report;
}

std::vector<SummaryRow> aggregate(const std::vector<MetricRecord>& records,
                                  const std::string& param_name) {
  if (records.empty()) throw std::invalid_argument("no records to aggregate");

  std::vector<int> order; // distinct value_index in first-appearance order
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.value_index) == order.end())
      order.push_back(r.value_index);

  std::vector<SummaryRow> rows;
  for (int vi : order) {
    SummaryRow row;
    row.param = param_name;
    std::vector<double> rmse_vals, inv_mfnn_vals;
    for (const auto& r : records) {
      if (r.value_index != vi) continue;
      if (!row.has_value && !param_name.empty()) {
        row.has_value = true;
        row.value = param_name == "input_scaling" ? r.input_scaling : r.spectral_radius;
      }
      if (r.ok) {
        ++row.n_ok;
        rmse_vals.push_back(r.test_rmse);
        inv_mfnn_vals.push_back(r.inverse_mfnn);
      } else {
        ++row.n_failed;
      }
    }
    row.test_rmse = stats_of(std::move(rmse_vals));
    row.inverse_mfnn = stats_of(std::move(inv_mfnn_vals));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_records_csv(std::ostream& os, const std::vector<MetricRecord>& records) {
  os << "value_index,repetition,run_seed,status,spectral_radius,input_scaling,d_r,"
        "avg_degree,bias,lambda,train_rmse,test_rmse,test_rmse_c0,test_rmse_c1,"
        "mfnn_median,mfnn_mean,inverse_mfnn,replica_converged,"
        "replica_convergence_time,error\n";
  for (const auto& r : records) {
    os << r.value_index << "," << r.repetition << "," << r.run_seed << ","
       << (r.ok ? "ok" : "failed") << "," << fmt17(r.spectral_radius) << ","
       << fmt17(r.input_scaling) << "," << r.d_r << "," << r.avg_degree << ","
       << fmt17(r.bias) << "," << fmt17(r.lambda) << ",";
    if (r.ok) {
      os << fmt17(r.train_rmse) << "," << fmt17(r.test_rmse) << ",";
      os << (r.test_rmse_per_coord.size() > 0 ? fmt17(r.test_rmse_per_coord[0]) : "") << ",";
      os << (r.test_rmse_per_coord.size() > 1 ? fmt17(r.test_rmse_per_coord[1]) : "") << ",";
      os << fmt17(r.mfnn_aggregate) << "," << fmt17(r.mfnn_mean) << ","
         << fmt17(r.inverse_mfnn) << "," << (r.replica_converged ? "true" : "false") << ",";
      if (r.replica_convergence_time) os << *r.replica_convergence_time;
      os << ",";
    } else {
      os << ",,,,,,,,,";
    }
    os << csv_field(r.error) << "\n";
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "param,value,n_ok,n_failed,test_rmse_mean,test_rmse_median,test_rmse_min,"
        "test_rmse_max,inverse_mfnn_mean,inverse_mfnn_median,inverse_mfnn_min,"
        "inverse_mfnn_max\n";
  for (const auto& row : rows) {
    os << row.param << "," << (row.has_value ? fmt17(row.value) : "") << "," << row.n_ok
       << "," << row.n_failed << "," << opt_field(row.test_rmse.mean) << ","
       << opt_field(row.test_rmse.median) << "," << opt_field(row.test_rmse.min) << ","
       << opt_field(row.test_rmse.max) << "," << opt_field(row.inverse_mfnn.mean) << ","
       << opt_field(row.inverse_mfnn.median) << "," << opt_field(row.inverse_mfnn.min)
       << "," << opt_field(row.inverse_mfnn.max) << "\n";
  }
}

void write_ergodicity_csv(std::ostream& os, const ErgodicityReport& report) {
  os << "trajectory,test_rmse,ratio\n";
  os << "0," << fmt17(report.original_rmse) << "," << fmt17(1.0) << "\n";
  for (std::size_t j = 0; j < report.fresh_rmse.size(); ++j)
    os << (j + 1) << "," << fmt17(report.fresh_rmse[j]) << "," << fmt17(report.ratios[j])
       << "\n";
}

} // namespace rcsync
