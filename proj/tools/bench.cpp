// Benchmark comparing the OpenMP MFNN kernel against the serial reference
// scan, and a sweep at one thread against all threads. The parallel and
// serial MFNN paths must agree exactly; the benchmark checks that too.

#include "rcsync/experiments.hpp"
#include "rcsync/syncmetrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <iostream>

using namespace rcsync;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main() {
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::cout << "threads: " << threads << "\n";

  // Realistic MFNN workload: source states vs reservoir states over the
  // predicting window of a default Lorenz observer run.
  ExperimentConfig cfg = ExperimentConfig::lorenz_defaults();
  cfg.root_seed = 7;
  const RunArtifacts art = run_task(cfg, cfg.root_seed);
  const Eigen::Index n_test = cfg.test_steps();
  const Mat X = art.trajectory.states.bottomRows(n_test);
  const Mat R = art.states.rightCols(n_test).transpose();

  auto t0 = std::chrono::steady_clock::now();
  const MfnnResult fast = mfnn(X, R, cfg.theiler_window, 1);
  const double t_fast = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const MfnnResult slow = mfnn_bruteforce_oracle(X, R, cfg.theiler_window, 1);
  const double t_slow = seconds_since(t0);

  double max_diff = 0.0;
  for (std::size_t i = 0; i < fast.per_sample.size(); ++i)
    max_diff = std::max(max_diff, std::abs(fast.per_sample[i] - slow.per_sample[i]));

  std::cout << "mfnn T=" << X.rows() << " d_r=" << R.cols() << "\n";
  std::cout << "  parallel kernel: " << t_fast << " s\n";
  std::cout << "  serial reference: " << t_slow << " s\n";
  std::cout << "  speedup: " << t_slow / t_fast << "x\n";
  std::cout << "  max |diff|: " << max_diff << (max_diff == 0.0 ? " (exact)" : "") << "\n";

  // Sweep throughput: a small spectral-radius sweep at 1 thread vs all.
  ExperimentConfig sweep_cfg = cfg;
  sweep_cfg.repetitions = 2;
  const std::vector<double> values{0.4, 1.0, 2.0};

#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  t0 = std::chrono::steady_clock::now();
  (void)sweep(sweep_cfg, SweepParam::SpectralRadius, values);
  const double t_serial = seconds_since(t0);

#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
  t0 = std::chrono::steady_clock::now();
  (void)sweep(sweep_cfg, SweepParam::SpectralRadius, values);
  const double t_parallel = seconds_since(t0);

  std::cout << "sweep (" << values.size() * sweep_cfg.repetitions << " runs)\n";
  std::cout << "  1 thread: " << t_serial << " s\n";
  std::cout << "  " << threads << " threads: " << t_parallel << " s\n";
  std::cout << "  speedup: " << t_serial / t_parallel << "x\n";
  return 0;
}
