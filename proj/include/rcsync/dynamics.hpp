#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcsync {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

struct RosslerParams {
  double a = 0.1;
  double b = 0.1;
  double c = 14.0;
};

enum class SystemKind { Lorenz, Roessler, CoupledIdentical };

/// An autonomous source system. CoupledIdentical is two copies of a base
/// system (Lorenz or Roessler) with diffusive coupling terms
/// c_a.*(x_a - x_b) and c_b.*(x_b - x_a) added to the respective halves.
struct SourceSystemSpec {
  SystemKind kind = SystemKind::Lorenz;
  LorenzParams lorenz{};
  RosslerParams rossler{};

  // CoupledIdentical only: the base system and per-component couplings.
  SystemKind base_kind = SystemKind::Lorenz;
  Vec coupling_a;
  Vec coupling_b;

  int dimension() const;
  void validate() const;

  static SourceSystemSpec make_lorenz(LorenzParams p = {});
  static SourceSystemSpec make_roessler(RosslerParams p = {});
  static SourceSystemSpec make_coupled(SystemKind base, const Vec& c_a, const Vec& c_b);
};

/// Uniformly sampled trajectory: row i holds the state at t0 + i*tau.
struct Trajectory {
  double t0 = 0.0;
  double tau = 0.0;
  Mat states; // T x d

  Eigen::Index samples() const { return states.rows(); }
  Eigen::Index dim() const { return states.cols(); }
  double time_at(Eigen::Index i) const { return t0 + static_cast<double>(i) * tau; }
};

/// Thrown when an integrated state leaves the finite/bounded regime.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, Eigen::Index step)
      : std::runtime_error(what), step_(step) {}
  Eigen::Index step() const { return step_; }

private:
  Eigen::Index step_;
};

Vec lorenz_derivative(const Vec& state, const LorenzParams& p);
Vec rossler_derivative(const Vec& state, const RosslerParams& p);

/// Vector field of the coupled pair, returned as (dxa/dt, dxb/dt).
std::pair<Vec, Vec> coupled_identical_derivative(const Vec& xa, const Vec& xb,
                                                 const SourceSystemSpec& spec);

/// Full vector field of any SourceSystemSpec (coupled systems are stacked).
Vec system_derivative(const SourceSystemSpec& spec, const Vec& state);

/// Classical RK4 with `substeps` inner steps per sample; rows are sampled
/// every tau. Returns n_steps+1 rows, row 0 = s0. Aborts with
/// DivergenceError when any component goes non-finite or beyond 1e6.
Trajectory integrate(const SourceSystemSpec& spec, const Vec& s0, double tau,
                     Eigen::Index n_steps, int substeps, double t0 = 0.0);

/// Integrate for t_washout time units and return the terminal state, used
/// to place a random initial condition onto the attractor.
Vec washout_source(const SourceSystemSpec& spec, const Vec& s0, double t_washout,
                   double tau, int substeps);

/// Select coordinates of a trajectory; returns T x selector.size().
Mat measure(const Trajectory& traj, const std::vector<int>& selector);

/// CSV with header `t,x0,x1,...`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace rcsync
