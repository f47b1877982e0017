#pragma once

#include "rcsync/reservoir.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace rcsync {

/// Mutual-false-nearest-neighbors evaluation over a pair of time-aligned
/// state series. Values near 1 indicate generalized synchronization.
struct MfnnResult {
  std::vector<double> per_sample;   // retained MFNN(n) values
  std::vector<int> sample_index;    // the n each retained value belongs to
  double aggregate = 0.0;           // median of per_sample
  double mean = 0.0;                // arithmetic mean of per_sample
  double inverse_aggregate = 0.0;   // 1 / aggregate
  int n_evaluated = 0;
  int theiler_window = 0;
};

struct ReplicaReport {
  std::vector<double> divergence; // ||r(t) - r~(t)|| per consumed input sample
  bool converged = false;
  std::optional<int> convergence_time; // first index after which divergence stays below threshold
  double threshold = 0.0;
};

/// Index of the point closest to points.row(query), excluding all rows
/// within `theiler_window` of the query in time. Ties break to the
/// smallest index.
int nearest_neighbor_index(const Mat& points, int query, int theiler_window);

/// MFNN(n) for every n on the `subsample` stride: the product of the
/// response/drive distance ratio at the drive-space nearest neighbor and
/// the drive/response ratio at the response-space nearest neighbor.
/// Samples whose denominator distances fall below 1e-12 are skipped.
/// X is T x d_s (drive states as rows), R is T x d_r (response states as
/// rows), time-aligned. Parallelized over samples; the aggregation is
/// order-independent.
MfnnResult mfnn(const Mat& X, const Mat& R, int theiler_window = 10, int subsample = 1);

/// Same contract as mfnn, evaluated by plain serial scans. Test oracle.
MfnnResult mfnn_bruteforce_oracle(const Mat& X, const Mat& R, int theiler_window = 10,
                                  int subsample = 1);

/// Drive two copies of the reservoir with the same input from two initial
/// conditions and record the divergence of their states. Convergence means
/// the divergence falls below `threshold` and stays below it for the rest
/// of the series.
ReplicaReport replica_test(const Reservoir& res, const Vec& u, const Vec& r0_a,
                           const Vec& r0_b, double threshold);

/// First-order bound on the synchronization error caused by a reservoir
/// state perturbation of norm eta_norm: eta_norm divided by the smallest
/// nonzero singular value of the readout (values below 1e-12 times the
/// largest are treated as zero).
double noise_error_bound(const Mat& W_out, double eta_norm);

void write_mfnn_csv(std::ostream& os, const MfnnResult& result);
void write_replica_csv(std::ostream& os, const ReplicaReport& report, double t_start = 0.0,
                       double t_step = 1.0);

} // namespace rcsync
