#include "rcsync/dynamics.hpp"

#include "rcsync/csv.hpp"

#include <cmath>
#include <ostream>

namespace rcsync {

namespace {

constexpr double kDivergenceBound = 1e6;

bool state_ok(const Vec& s) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || std::abs(s[i]) > kDivergenceBound) return false;
  }
  return true;
}

int base_dimension(SystemKind kind) {
  switch (kind) {
    case SystemKind::Lorenz:
    case SystemKind::Roessler:
      return 3;
    case SystemKind::CoupledIdentical:
      return -1;
  }
  return -1;
}

Vec base_derivative(const SourceSystemSpec& spec, SystemKind kind, const Vec& s) {
  return kind == SystemKind::Lorenz ? lorenz_derivative(s, spec.lorenz)
                                    : rossler_derivative(s, spec.rossler);
}

Vec rk4_step(const SourceSystemSpec& spec, const Vec& s, double h) {
  const Vec k1 = system_derivative(spec, s);
  const Vec k2 = system_derivative(spec, s + (h / 2.0) * k1);
  const Vec k3 = system_derivative(spec, s + (h / 2.0) * k2);
  const Vec k4 = system_derivative(spec, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

int SourceSystemSpec::dimension() const {
  if (kind == SystemKind::CoupledIdentical) return 2 * base_dimension(base_kind);
  return base_dimension(kind);
}

void SourceSystemSpec::validate() const {
  auto check_finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite parameter: ") + name);
  };
  check_finite(lorenz.sigma, "sigma");
  check_finite(lorenz.rho, "rho");
  check_finite(lorenz.beta, "beta");
  check_finite(rossler.a, "a");
  check_finite(rossler.b, "b");
  check_finite(rossler.c, "c");
  if (kind == SystemKind::CoupledIdentical) {
    if (base_kind == SystemKind::CoupledIdentical)
      throw std::invalid_argument("coupled system cannot use a coupled base");
    const int d = base_dimension(base_kind);
    if (coupling_a.size() != d || coupling_b.size() != d)
      throw std::invalid_argument("coupling vectors must match the base system dimension");
    if (!coupling_a.allFinite() || !coupling_b.allFinite())
      throw std::invalid_argument("non-finite coupling constants");
  }
}

SourceSystemSpec SourceSystemSpec::make_lorenz(LorenzParams p) {
  SourceSystemSpec s;
  s.kind = SystemKind::Lorenz;
  s.lorenz = p;
  return s;
}

SourceSystemSpec SourceSystemSpec::make_roessler(RosslerParams p) {
  SourceSystemSpec s;
  s.kind = SystemKind::Roessler;
  s.rossler = p;
  return s;
}

SourceSystemSpec SourceSystemSpec::make_coupled(SystemKind base, const Vec& c_a, const Vec& c_b) {
  SourceSystemSpec s;
  s.kind = SystemKind::CoupledIdentical;
  s.base_kind = base;
  s.coupling_a = c_a;
  s.coupling_b = c_b;
  s.validate();
  return s;
}

Vec lorenz_derivative(const Vec& state, const LorenzParams& p) {
  const double x = state[0], y = state[1], z = state[2];
  Vec d(3);
  d[0] = p.sigma * (y - x);
  d[1] = (p.rho - z) * x - y;
  d[2] = x * y - p.beta * z;
  return d;
}

Vec rossler_derivative(const Vec& state, const RosslerParams& p) {
  const double x = state[0], y = state[1], z = state[2];
  Vec d(3);
  d[0] = -y - z;
  d[1] = x + p.a * y;
  d[2] = p.b + z * (x - p.c);
  return d;
}

std::pair<Vec, Vec> coupled_identical_derivative(const Vec& xa, const Vec& xb,
                                                 const SourceSystemSpec& spec) {
  const int d = base_dimension(spec.base_kind);
  if (xa.size() != d || xb.size() != d)
    throw std::invalid_argument("state dimension does not match the base system");
  if (spec.coupling_a.size() != d || spec.coupling_b.size() != d)
    throw std::invalid_argument("coupling vectors must match the base system dimension");
  Vec da = base_derivative(spec, spec.base_kind, xa);
  Vec db = base_derivative(spec, spec.base_kind, xb);
  da += spec.coupling_a.cwiseProduct(xa - xb);
  db += spec.coupling_b.cwiseProduct(xb - xa);
  return {std::move(da), std::move(db)};
}

Vec system_derivative(const SourceSystemSpec& spec, const Vec& state) {
  switch (spec.kind) {
    case SystemKind::Lorenz:
      return lorenz_derivative(state, spec.lorenz);
    case SystemKind::Roessler:
      return rossler_derivative(state, spec.rossler);
    case SystemKind::CoupledIdentical: {
      const int d = base_dimension(spec.base_kind);
      auto [da, db] = coupled_identical_derivative(state.head(d), state.tail(d), spec);
      Vec out(2 * d);
      out.head(d) = da;
      out.tail(d) = db;
      return out;
    }
  }
  throw std::logic_error("unknown system kind");
}

Trajectory integrate(const SourceSystemSpec& spec, const Vec& s0, double tau,
                     Eigen::Index n_steps, int substeps, double t0) {
  spec.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (s0.size() != spec.dimension()) throw std::invalid_argument("initial state has wrong dimension");

  const double h = tau / static_cast<double>(substeps);
  Trajectory traj;
  traj.t0 = t0;
  traj.tau = tau;
  traj.states.resize(n_steps + 1, s0.size());
  traj.states.row(0) = s0;

  Vec s = s0;
  for (Eigen::Index i = 1; i <= n_steps; ++i) {
    for (int k = 0; k < substeps; ++k) s = rk4_step(spec, s, h);
    if (!state_ok(s))
      throw DivergenceError("trajectory diverged at step " + std::to_string(i), i);
    traj.states.row(i) = s;
  }
  return traj;
}

Vec washout_source(const SourceSystemSpec& spec, const Vec& s0, double t_washout,
                   double tau, int substeps) {
  if (!(t_washout >= 0.0)) throw std::invalid_argument("t_washout must be >= 0");
  const auto n = static_cast<Eigen::Index>(std::llround(t_washout / tau));
  if (n == 0) return s0;
  Trajectory traj = integrate(spec, s0, tau, n, substeps);
  return traj.states.row(traj.samples() - 1);
}

Mat measure(const Trajectory& traj, const std::vector<int>& selector) {
  Mat out(traj.samples(), static_cast<Eigen::Index>(selector.size()));
  for (std::size_t j = 0; j < selector.size(); ++j) {
    const int c = selector[j];
    if (c < 0 || c >= traj.dim())
      throw std::out_of_range("measurement selector index " + std::to_string(c) +
                              " out of range for dimension " + std::to_string(traj.dim()));
    out.col(static_cast<Eigen::Index>(j)) = traj.states.col(c);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (Eigen::Index j = 0; j < traj.dim(); ++j) os << ",x" << j;
  os << "\n";
  for (Eigen::Index i = 0; i < traj.samples(); ++i) {
    os << fmt17(traj.time_at(i));
    for (Eigen::Index j = 0; j < traj.dim(); ++j) os << "," << fmt17(traj.states(i, j));
    os << "\n";
  }
}

} // namespace rcsync
