#pragma once

#include "rcsync/dynamics.hpp"

namespace rcsync {

struct FitReport {
  double lambda = 0.0;
  double train_rmse = 0.0;
  // Ratio of largest to smallest eigenvalue of the regularized normal
  // matrix R R^T + lambda I; infinity when the smallest is not positive.
  double condition_hint = 0.0;
};

struct RidgeFit {
  Mat W_out; // d_y x d_r
  FitReport report;
};

/// Ridge regression W_out = Y R^T (R R^T + lambda I)^-1 via Cholesky of the
/// regularized normal matrix. R is d_r x T (states as columns), Y is d_y x T.
RidgeFit fit_ridge(const Mat& R, const Mat& Y, double lambda);

/// Y_hat = W_out R, column-wise readout.
Mat predict(const Mat& W_out, const Mat& R);

struct RmseResult {
  Vec per_coordinate; // sqrt of the per-row mean squared error
  double mean = 0.0;  // average of the per-coordinate values
};

RmseResult rmse(const Mat& Y, const Mat& Y_hat);

/// Dense row-major CSV of a readout (or any) matrix.
void write_matrix_csv(std::ostream& os, const Mat& m);

} // namespace rcsync
