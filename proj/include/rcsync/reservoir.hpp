#pragma once

#include "rcsync/dynamics.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <string>

namespace rcsync {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Reservoir states collected while driving, one column per sample time.
using StateMatrix = Eigen::MatrixXd; // d_r x T

struct ReservoirSpec {
  int d_r = 300;
  double spectral_radius = 1.0;
  double input_scaling = 0.1;
  double bias = 1.0;
  int avg_degree = 6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Realized network: sparse connectivity W (rescaled to the requested
/// spectral radius), input vector w with entries in (-omega, omega), and a
/// constant bias vector. Immutable after construction.
struct Reservoir {
  SparseMat W;
  Vec w;
  Vec b_vec;
  ReservoirSpec spec;
};

/// Largest eigenvalue modulus, estimated by two-column subspace power
/// iteration (the 2-d block also converges when the dominant eigenvalue is
/// a complex-conjugate pair, where plain power iteration stalls). Returns 0
/// for nilpotent-like matrices whose iterates collapse; throws after 1e5
/// iterations without convergence to 1e-10 relative.
double spectral_radius(const SparseMat& W, std::uint64_t seed = 0x0DDB1A5E5BAD5EEDULL);

/// Erdos-Renyi connectivity with edge probability avg_degree/d_r, nonzeros
/// uniform on (-1,1), rescaled to the requested spectral radius. Resamples
/// with an incremented seed when the sampled matrix has zero radius; gives
/// up after 10 attempts.
Reservoir build_reservoir(const ReservoirSpec& spec);

/// Iterate r <- tanh(W r + w u_t + b) over the input series starting from
/// r0; column t holds the state after consuming u[t].
StateMatrix drive(const Reservoir& res, const Vec& u, const Vec& r0);

struct ListenResult {
  StateMatrix states;  // washout columns removed
  Eigen::Index offset; // index of the first retained column in the driven series
};

/// Drive the full series, then discard the first floor(washout_fraction*T)
/// columns of transient.
ListenResult listen(const Reservoir& res, const Vec& u, const Vec& r0,
                    double washout_fraction);

/// Archival format: W as `row,col,value` triplets, vectors and the spec as
/// small CSV files inside `dir`.
void save_reservoir(const Reservoir& res, const std::string& dir);
Reservoir load_reservoir(const std::string& dir);

} // namespace rcsync
