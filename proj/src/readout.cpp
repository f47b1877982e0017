#include "rcsync/readout.hpp"

#include "rcsync/csv.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rcsync {

RidgeFit fit_ridge(const Mat& R, const Mat& Y, double lambda) {
  if (R.cols() != Y.cols()) throw std::invalid_argument("state and target column counts differ");
  if (R.cols() < 1) throw std::invalid_argument("empty training data");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be >= 0");
  if (R.cols() < R.rows())
    std::cerr << "warning: fitting " << R.rows() << " reservoir dimensions from only "
              << R.cols() << " samples\n";

  Mat G = R * R.transpose();
  G.diagonal().array() += lambda;

  // Eigenvalues of the regularized normal matrix; doubles as the
  // rank/conditioning probe (G is symmetric PSD + lambda).
  Eigen::SelfAdjointEigenSolver<Mat> eig(G, Eigen::EigenvaluesOnly);
  const double ev_min = eig.eigenvalues().minCoeff();
  const double ev_max = eig.eigenvalues().maxCoeff();
  if (lambda == 0.0 &&
      ev_min <= static_cast<double>(G.rows()) * std::numeric_limits<double>::epsilon() * ev_max) {
    throw std::runtime_error(
        "normal matrix is singular with lambda = 0; use a positive regularization");
  }

  RidgeFit fit;
  fit.report.lambda = lambda;
  fit.report.condition_hint =
      ev_min > 0.0 ? ev_max / ev_min : std::numeric_limits<double>::infinity();

  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("Cholesky factorization of the normal matrix failed");
  // W_out^T solves G X = R Y^T.
  fit.W_out = llt.solve(R * Y.transpose()).transpose();

  fit.report.train_rmse = rmse(Y, fit.W_out * R).mean;
  return fit;
}

Mat predict(const Mat& W_out, const Mat& R) {
  if (W_out.cols() != R.rows())
    throw std::invalid_argument("readout and state dimensions do not match");
  return W_out * R;
}

RmseResult rmse(const Mat& Y, const Mat& Y_hat) {
  if (Y.rows() != Y_hat.rows() || Y.cols() != Y_hat.cols())
    throw std::invalid_argument("target and prediction shapes differ");
  if (Y.cols() < 1 || Y.rows() < 1) throw std::invalid_argument("empty input");

  RmseResult out;
  out.per_coordinate =
      ((Y - Y_hat).array().square().rowwise().mean()).sqrt().matrix();
  out.mean = out.per_coordinate.mean();
  return out;
}

void write_matrix_csv(std::ostream& os, const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ",";
      os << fmt17(m(i, j));
    }
    os << "\n";
  }
}

} // namespace rcsync
