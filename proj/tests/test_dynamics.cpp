#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rcsync/dynamics.hpp"
#include "rcsync/rng.hpp"

#include <cmath>
#include <sstream>

using namespace rcsync;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Exact flow of the rotation field dx/dt = (y, -x).
Vec rotation_exact(const Vec& s0, double t) {
  Vec out(2);
  out[0] = s0[0] * std::cos(t) + s0[1] * std::sin(t);
  out[1] = -s0[0] * std::sin(t) + s0[1] * std::cos(t);
  return out;
}

} // namespace

TEST_CASE("lorenz derivative at the origin fixed point") {
  const Vec d = lorenz_derivative(v3(0, 0, 0), LorenzParams{});
  CHECK(d.norm() == 0.0);
}

TEST_CASE("lorenz derivative direct substitution") {
  const Vec d = lorenz_derivative(v3(1, 1, 1), LorenzParams{});
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(26.0));
  CHECK(d[2] == doctest::Approx(1.0 - 8.0 / 3.0));
}

TEST_CASE("lorenz derivative against independently evaluated formulas") {
  const LorenzParams p;
  const double x = -1.0, y = 2.0, z = 3.0;
  // Each component evaluated separately, by hand.
  const double ex = 10.0 * (2.0 - (-1.0));        // sigma*(y-x) = 30
  const double ey = (28.0 - 3.0) * (-1.0) - 2.0;  // (rho-z)x - y = -27
  const double ez = (-1.0) * 2.0 - (8.0 / 3.0) * 3.0; // xy - beta*z = -10
  const Vec d = lorenz_derivative(v3(x, y, z), p);
  CHECK(d[0] == ex);
  CHECK(d[1] == ey);
  CHECK(d[2] == ez);
  CHECK(ex == 30.0);
  CHECK(ey == -27.0);
  CHECK(ez == doctest::Approx(-10.0));
}

TEST_CASE("rossler derivative direct substitution") {
  const Vec d0 = rossler_derivative(v3(0, 0, 0), RosslerParams{});
  CHECK(d0[0] == 0.0);
  CHECK(d0[1] == 0.0);
  CHECK(d0[2] == doctest::Approx(0.1));

  const Vec d1 = rossler_derivative(v3(1, 1, 1), RosslerParams{});
  CHECK(d1[0] == doctest::Approx(-2.0));
  CHECK(d1[1] == doctest::Approx(1.1));
  CHECK(d1[2] == doctest::Approx(-12.9));
}

TEST_CASE("rossler fixed point found by an independent solver has zero derivative") {
  // At a fixed point: z = -y, x = -a*y, and a*y^2 + c*y + b = 0. Solve the
  // quadratic directly and verify the vector field vanishes there.
  const RosslerParams p;
  const double disc = p.c * p.c - 4.0 * p.a * p.b;
  REQUIRE(disc > 0.0);
  for (const double y : {(-p.c + std::sqrt(disc)) / (2.0 * p.a),
                         (-p.c - std::sqrt(disc)) / (2.0 * p.a)}) {
    const Vec fp = v3(-p.a * y, y, -y);
    CHECK(rossler_derivative(fp, p).norm() < 1e-10);
  }
}

TEST_CASE("lorenz fixed points have zero derivative") {
  const LorenzParams p;
  const double r = std::sqrt(p.beta * (p.rho - 1.0));
  CHECK(lorenz_derivative(v3(r, r, p.rho - 1.0), p).norm() < 1e-10);
  CHECK(lorenz_derivative(v3(-r, -r, p.rho - 1.0), p).norm() < 1e-10);
}

TEST_CASE("coupled system with zero couplings evolves the halves independently") {
  const auto spec =
      SourceSystemSpec::make_coupled(SystemKind::Lorenz, Vec::Zero(3), Vec::Zero(3));
  const Vec xa = v3(1.0, 2.0, 3.0);
  const Vec xb = v3(-4.0, 0.5, 10.0);

  Vec joint(6);
  joint << xa, xb;
  const Trajectory coupled = integrate(spec, joint, 0.05, 50, 10);
  const auto lorenz = SourceSystemSpec::make_lorenz();
  const Trajectory ta = integrate(lorenz, xa, 0.05, 50, 10);
  const Trajectory tb = integrate(lorenz, xb, 0.05, 50, 10);

  CHECK((coupled.states.leftCols(3) - ta.states).cwiseAbs().maxCoeff() == 0.0);
  CHECK((coupled.states.rightCols(3) - tb.states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equal subsystem states make the coupling terms vanish exactly") {
  const auto spec = SourceSystemSpec::make_coupled(SystemKind::Lorenz,
                                                   v3(0.3, -2.0, 5.0), v3(-1.0, 0.0, 7.0));
  const Vec x = v3(2.0, -1.0, 20.0);
  const auto [da, db] = coupled_identical_derivative(x, x, spec);
  const Vec plain = lorenz_derivative(x, spec.lorenz);
  CHECK((da - plain).cwiseAbs().maxCoeff() == 0.0);
  CHECK((db - plain).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synchronization manifold is invariant: equal halves stay equal") {
  const auto spec = SourceSystemSpec::make_coupled(SystemKind::Lorenz,
                                                   v3(0.5, 0.5, 0.5), v3(-3.0, -3.0, -3.0));
  Vec joint(6);
  joint << 1.0, 1.0, 25.0, 1.0, 1.0, 25.0;
  const Trajectory traj = integrate(spec, joint, 0.05, 200, 10);
  for (Eigen::Index i = 0; i < traj.samples(); ++i) {
    CHECK((traj.states.row(i).head(3) - traj.states.row(i).tail(3)).norm() == 0.0);
  }
}

TEST_CASE("one-way coupling with strong contraction synchronizes the pair") {
  // c_a = 0 leaves subsystem a autonomous; strongly negative c_b pulls b
  // onto a. Threshold chosen from observed decay.
  const auto spec = SourceSystemSpec::make_coupled(
      SystemKind::Lorenz, Vec::Zero(3), Vec::Constant(3, -30.0));
  Vec joint(6);
  joint << 1.0, 2.0, 20.0, -8.0, 5.0, 33.0;
  const Trajectory traj = integrate(spec, joint, 0.05, 400, 10);
  const Eigen::Index last = traj.samples() - 1;
  const double initial = (traj.states.row(0).head(3) - traj.states.row(0).tail(3)).norm();
  const double final_d = (traj.states.row(last).head(3) - traj.states.row(last).tail(3)).norm();
  CHECK(initial > 1.0);
  CHECK(final_d < 1e-8);
}

TEST_CASE("coupled derivative rejects mismatched dimensions") {
  auto spec = SourceSystemSpec::make_coupled(SystemKind::Lorenz, Vec::Zero(3), Vec::Zero(3));
  spec.coupling_a = Vec::Zero(2);
  CHECK_THROWS_AS(coupled_identical_derivative(v3(0, 0, 0), v3(0, 0, 0), spec),
                  std::invalid_argument);
}

TEST_CASE("single RK4 sample step matches the exact linear flow") {
  // dx/dt = (y, -x) has the exact flow given by a rotation matrix; one
  // sample of length tau with one substep must agree to local O(tau^5).
  struct RotationOracle {
    static Vec field(const Vec& s) {
      Vec d(2);
      d << s[1], -s[0];
      return d;
    }
  };
  const double tau = 0.1;
  Vec s0(2);
  s0 << 1.0, 0.0;

  // Hand-rolled single RK4 step on the rotation field.
  const Vec k1 = RotationOracle::field(s0);
  const Vec k2 = RotationOracle::field(s0 + (tau / 2) * k1);
  const Vec k3 = RotationOracle::field(s0 + (tau / 2) * k2);
  const Vec k4 = RotationOracle::field(s0 + tau * k3);
  const Vec rk4 = s0 + (tau / 6) * (k1 + 2 * k2 + 2 * k3 + k4);

  const Vec exact = rotation_exact(s0, tau);
  CHECK((rk4 - exact).norm() < 1e-7);     // ~tau^5/120
  CHECK((rk4 - exact).norm() > 1e-12);    // genuinely truncated, not exact
}

TEST_CASE("RK4 global convergence order is 4 on a smooth system") {
  // Richardson study on the rotation field with a known exact solution.
  const auto lorenz_like = SourceSystemSpec::make_lorenz(); // placeholder spec for API
  (void)lorenz_like;

  // Use Roessler over a short window against a fine-substep reference.
  const auto spec = SourceSystemSpec::make_roessler();
  const Vec s0 = v3(1.0, 1.0, 1.0);
  const double tau = 0.4;
  const Eigen::Index steps = 10;
  const Vec ref = integrate(spec, s0, tau, steps, 4096).states.row(steps);
  const Vec coarse = integrate(spec, s0, tau, steps, 4).states.row(steps);
  const Vec fine = integrate(spec, s0, tau, steps, 8).states.row(steps);
  const double e_coarse = (coarse - ref).norm();
  const double e_fine = (fine - ref).norm();
  const double order = std::log2(e_coarse / e_fine);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("lorenz trajectory stays inside empirical attractor bounds") {
  const auto spec = SourceSystemSpec::make_lorenz();
  const Vec s0 = washout_source(spec, v3(3.0, -2.0, 15.0), 50.0, 0.05, 10);
  const Trajectory traj = integrate(spec, s0, 0.05, 10000, 10);
  CHECK(traj.states.col(0).cwiseAbs().maxCoeff() < 25.0);
  CHECK(traj.states.col(2).maxCoeff() < 55.0);
  CHECK(traj.states.col(2).minCoeff() > 0.0);
}

TEST_CASE("integration is deterministic") {
  const auto spec = SourceSystemSpec::make_lorenz();
  const Vec s0 = v3(1.0, 1.0, 1.0);
  const Trajectory a = integrate(spec, s0, 0.05, 500, 10);
  const Trajectory b = integrate(spec, s0, 0.05, 500, 10);
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence guard reports the failing step") {
  // Inverted Lorenz-like blowup: huge rho drives the state past the bound.
  auto spec = SourceSystemSpec::make_lorenz();
  spec.lorenz.rho = 1e5;
  spec.lorenz.sigma = 1e4;
  try {
    integrate(spec, v3(10.0, 10.0, 10.0), 0.5, 100, 1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
  }
}

TEST_CASE("integrate validates its inputs") {
  const auto spec = SourceSystemSpec::make_lorenz();
  CHECK_THROWS_AS(integrate(spec, v3(0, 0, 0), -1.0, 10, 10), std::invalid_argument);
  CHECK_THROWS_AS(integrate(spec, v3(0, 0, 0), 0.05, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(integrate(spec, v3(0, 0, 0), 0.05, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(spec, Vec::Zero(2), 0.05, 10, 10), std::invalid_argument);
}

TEST_CASE("washout_source") {
  const auto spec = SourceSystemSpec::make_lorenz();

  SUBCASE("returns an on-attractor state after a long washout") {
    const Vec s = washout_source(spec, v3(9.0, -9.0, 4.0), 100.0, 0.05, 10);
    CHECK(std::abs(s[0]) < 25.0);
    CHECK(std::abs(s[1]) < 35.0);
    CHECK(s[2] > 0.0);
    CHECK(s[2] < 55.0);
  }

  SUBCASE("zero washout returns the input unchanged") {
    const Vec s0 = v3(7.0, 8.0, 9.0);
    const Vec s = washout_source(spec, s0, 0.0, 0.05, 10);
    CHECK((s - s0).norm() == 0.0);
  }

  SUBCASE("distinct initial conditions stay distinct") {
    const Vec a = washout_source(spec, v3(1.0, 2.0, 3.0), 100.0, 0.05, 10);
    const Vec b = washout_source(spec, v3(1.0, 2.0, 3.0001), 100.0, 0.05, 10);
    CHECK((a - b).norm() > 0.0);
  }
}

TEST_CASE("measure selects coordinate series") {
  const auto spec = SourceSystemSpec::make_lorenz();
  const Trajectory traj = integrate(spec, v3(1.0, 1.0, 1.0), 0.05, 20, 10);

  const Mat x = measure(traj, {0});
  CHECK(x.rows() == traj.samples());
  CHECK((x.col(0) - traj.states.col(0)).norm() == 0.0);

  const Mat all = measure(traj, {0, 1, 2});
  CHECK((all - traj.states).cwiseAbs().maxCoeff() == 0.0);

  const Mat yz = measure(traj, {1, 2});
  CHECK(yz.cols() == 2);
  CHECK((yz.col(1) - traj.states.col(2)).norm() == 0.0);

  CHECK_THROWS_AS(measure(traj, {3}), std::out_of_range);
  CHECK_THROWS_AS(measure(traj, {-1}), std::out_of_range);
}

TEST_CASE("trajectory CSV has the documented header and full precision") {
  Trajectory traj;
  traj.t0 = -1.0;
  traj.tau = 0.5;
  traj.states.resize(2, 3);
  traj.states << 0.1, 0.2, 0.3, 1.0 / 3.0, -2.0, 55.5;
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  const std::string text = os.str();
  CHECK(text.rfind("t,x0,x1,x2\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(text.find("-0.5,") != std::string::npos); // second row time
}
