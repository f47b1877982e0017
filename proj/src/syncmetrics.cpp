#include "rcsync/syncmetrics.hpp"

#include "rcsync/csv.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rcsync {

namespace {

constexpr double kDegenerateDistance = 1e-12;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_mfnn_inputs(const Mat& X, const Mat& R, int theiler_window, int subsample) {
  if (X.rows() != R.rows()) throw std::invalid_argument("drive and response lengths differ");
  if (theiler_window < 0) throw std::invalid_argument("theiler_window must be >= 0");
  if (subsample < 1) throw std::invalid_argument("subsample must be >= 1");
  if (X.rows() < theiler_window + 2)
    throw std::invalid_argument("series too short for the Theiler window");
}

MfnnResult finalize_mfnn(std::vector<double> values, std::vector<int> indices,
                         int theiler_window) {
  if (values.size() < 10)
    throw std::runtime_error("fewer than 10 MFNN samples survive the degeneracy cutoff");
  MfnnResult out;
  out.aggregate = median_of(values);
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  out.inverse_aggregate = 1.0 / out.aggregate;
  out.n_evaluated = static_cast<int>(values.size());
  out.theiler_window = theiler_window;
  out.per_sample = std::move(values);
  out.sample_index = std::move(indices);
  return out;
}

// Contiguous row-major copy so each point is a flat slice.
std::vector<double> row_major_copy(const Mat& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  return out;
}

// Nearest admissible neighbor on flat row-major data; squared distances
// accumulated coordinate by coordinate so the fast path and the oracle are
// bit-identical. Returns {index, squared distance}.
std::pair<int, double> scan_nearest(const double* data, int T, int d, int query,
                                    int theiler_window) {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  const double* q = data + static_cast<std::size_t>(query) * d;
  for (int m = 0; m < T; ++m) {
    if (std::abs(m - query) <= theiler_window) continue;
    const double* p = data + static_cast<std::size_t>(m) * d;
    double d2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double diff = q[j] - p[j];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = m;
    }
  }
  return {best, best_d2};
}

double mfnn_ratio_at(const double* xd, int ds, const double* rd, int dr, int T, int n,
                     int theiler_window, bool& skip) {
  const auto [nnd, d2_x_nnd] = scan_nearest(xd, T, ds, n, theiler_window);
  const auto [nnr, d2_r_nnr] = scan_nearest(rd, T, dr, n, theiler_window);
  if (nnd < 0 || nnr < 0) throw std::runtime_error("no admissible neighbor");

  auto dist = [](const double* data, int d, int a, int b) {
    const double* pa = data + static_cast<std::size_t>(a) * d;
    const double* pb = data + static_cast<std::size_t>(b) * d;
    double d2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double diff = pa[j] - pb[j];
      d2 += diff * diff;
    }
    return std::sqrt(d2);
  };

  const double x_nnd = std::sqrt(d2_x_nnd);   // ||x_n - x_nnd||
  const double r_nnr = std::sqrt(d2_r_nnr);   // ||r_n - r_nnr||
  if (x_nnd < kDegenerateDistance || r_nnr < kDegenerateDistance) {
    skip = true;
    return 0.0;
  }
  skip = false;
  const double r_nnd = dist(rd, dr, n, nnd);  // ||r_n - r_nnd||
  const double x_nnr = dist(xd, ds, n, nnr);  // ||x_n - x_nnr||
  return (r_nnd / x_nnd) * (x_nnr / r_nnr);
}

} // namespace

int nearest_neighbor_index(const Mat& points, int query, int theiler_window) {
  const int T = static_cast<int>(points.rows());
  if (theiler_window < 0) throw std::invalid_argument("theiler_window must be >= 0");
  if (query < 0 || query >= T) throw std::out_of_range("query index out of range");
  if (T < theiler_window + 2)
    throw std::invalid_argument("series too short for the Theiler window");

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int m = 0; m < T; ++m) {
    if (std::abs(m - query) <= theiler_window) continue;
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double diff = points(query, j) - points(m, j);
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = m;
    }
  }
  if (best < 0) throw std::runtime_error("no admissible neighbor");
  return best;
}

MfnnResult mfnn(const Mat& X, const Mat& R, int theiler_window, int subsample) {
  check_mfnn_inputs(X, R, theiler_window, subsample);
  const int T = static_cast<int>(X.rows());
  const int ds = static_cast<int>(X.cols());
  const int dr = static_cast<int>(R.cols());
  const std::vector<double> xd = row_major_copy(X);
  const std::vector<double> rd = row_major_copy(R);

  const int n_queries = (T + subsample - 1) / subsample;
  std::vector<double> value(n_queries, 0.0);
  std::vector<char> skipped(n_queries, 0);

#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_queries; ++k) {
    const int n = k * subsample;
    bool skip = false;
    value[k] = mfnn_ratio_at(xd.data(), ds, rd.data(), dr, T, n, theiler_window, skip);
    skipped[k] = skip ? 1 : 0;
  }

  std::vector<double> retained;
  std::vector<int> indices;
  retained.reserve(n_queries);
  indices.reserve(n_queries);
  for (int k = 0; k < n_queries; ++k) {
    if (!skipped[k]) {
      retained.push_back(value[k]);
      indices.push_back(k * subsample);
    }
  }
  return finalize_mfnn(std::move(retained), std::move(indices), theiler_window);
}

MfnnResult mfnn_bruteforce_oracle(const Mat& X, const Mat& R, int theiler_window,
                                  int subsample) {
  check_mfnn_inputs(X, R, theiler_window, subsample);
  const int T = static_cast<int>(X.rows());

  std::vector<double> retained;
  std::vector<int> indices;
  for (int n = 0; n < T; n += subsample) {
    // Exhaustive scans written out directly from the definition.
    int nnd = -1, nnr = -1;
    double best_x = std::numeric_limits<double>::infinity();
    double best_r = std::numeric_limits<double>::infinity();
    for (int m = 0; m < T; ++m) {
      if (std::abs(m - n) <= theiler_window) continue;
      double dx2 = 0.0;
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double diff = X(n, j) - X(m, j);
        dx2 += diff * diff;
      }
      if (dx2 < best_x) {
        best_x = dx2;
        nnd = m;
      }
      double dr2 = 0.0;
      for (Eigen::Index j = 0; j < R.cols(); ++j) {
        const double diff = R(n, j) - R(m, j);
        dr2 += diff * diff;
      }
      if (dr2 < best_r) {
        best_r = dr2;
        nnr = m;
      }
    }
    if (nnd < 0 || nnr < 0) throw std::runtime_error("no admissible neighbor");

    const double x_nnd = std::sqrt(best_x);
    const double r_nnr = std::sqrt(best_r);
    if (x_nnd < kDegenerateDistance || r_nnr < kDegenerateDistance) continue;

    double r_nnd2 = 0.0;
    for (Eigen::Index j = 0; j < R.cols(); ++j) {
      const double diff = R(n, j) - R(nnd, j);
      r_nnd2 += diff * diff;
    }
    double x_nnr2 = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double diff = X(n, j) - X(nnr, j);
      x_nnr2 += diff * diff;
    }
    const double r_nnd = std::sqrt(r_nnd2);
    const double x_nnr = std::sqrt(x_nnr2);
    retained.push_back((r_nnd / x_nnd) * (x_nnr / r_nnr));
    indices.push_back(n);
  }
  return finalize_mfnn(std::move(retained), std::move(indices), theiler_window);
}

ReplicaReport replica_test(const Reservoir& res, const Vec& u, const Vec& r0_a,
                           const Vec& r0_b, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (r0_a.size() != res.W.rows() || r0_b.size() != res.W.rows())
    throw std::invalid_argument("replica initial conditions have wrong dimension");

  const StateMatrix sa = drive(res, u, r0_a);
  const StateMatrix sb = drive(res, u, r0_b);

  ReplicaReport report;
  report.threshold = threshold;
  report.divergence.resize(static_cast<std::size_t>(u.size()));
  for (Eigen::Index t = 0; t < u.size(); ++t)
    report.divergence[static_cast<std::size_t>(t)] = (sa.col(t) - sb.col(t)).norm();

  // Last sample at or above threshold decides convergence.
  int last_bad = -1;
  for (int t = 0; t < static_cast<int>(report.divergence.size()); ++t)
    if (report.divergence[static_cast<std::size_t>(t)] >= threshold) last_bad = t;

  if (last_bad + 1 < static_cast<int>(report.divergence.size())) {
    report.converged = true;
    report.convergence_time = last_bad + 1;
  }
  return report;
}

double noise_error_bound(const Mat& W_out, double eta_norm) {
  if (!(eta_norm >= 0.0)) throw std::invalid_argument("eta_norm must be >= 0");
  if (W_out.size() == 0) throw std::invalid_argument("empty readout matrix");
  Eigen::JacobiSVD<Mat> svd(W_out);
  const Vec& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv[0];
  double smallest = -1.0;
  for (Eigen::Index i = sv.size() - 1; i >= 0; --i) {
    if (sv[i] > cutoff) {
      smallest = sv[i];
      break;
    }
  }
  if (smallest <= 0.0)
    throw std::runtime_error("readout has no nonzero singular value");
  return eta_norm / smallest;
}

void write_mfnn_csv(std::ostream& os, const MfnnResult& result) {
  os << "n,mfnn\n";
  for (std::size_t k = 0; k < result.per_sample.size(); ++k)
    os << result.sample_index[k] << "," << fmt17(result.per_sample[k]) << "\n";
}

void write_replica_csv(std::ostream& os, const ReplicaReport& report, double t_start,
                       double t_step) {
  os << "t,divergence\n";
  for (std::size_t i = 0; i < report.divergence.size(); ++i)
    os << fmt17(t_start + static_cast<double>(i) * t_step) << ","
       << fmt17(report.divergence[i]) << "\n";
}

} // namespace rcsync
