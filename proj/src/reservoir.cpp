#include "rcsync/reservoir.hpp"

#include "rcsync/csv.hpp"
#include "rcsync/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rcsync {

namespace {

constexpr double kSrTol = 1e-10;
constexpr int kSrMaxIters = 100000;

// Largest modulus among the eigenvalues of a 2x2 matrix.
double dominant_modulus_2x2(double a, double b, double c, double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return std::max(std::abs(tr / 2.0 + root), std::abs(tr / 2.0 - root));
  }
  return std::sqrt(det); // complex pair: |lambda|^2 = det
}

// Orthonormalize two columns in place; re-randomizes the second column when
// it is numerically parallel to the first (rank-1 iterate).
bool orthonormalize(Mat& V, Rng& rng) {
  const double n0 = V.col(0).norm();
  if (n0 < 1e-300) return false;
  V.col(0) /= n0;
  V.col(1) -= V.col(0).dot(V.col(1)) * V.col(0);
  double n1 = V.col(1).norm();
  if (n1 < 1e-12) {
    for (Eigen::Index i = 0; i < V.rows(); ++i) V(i, 1) = rng.uniform(-1.0, 1.0);
    V.col(1) -= V.col(0).dot(V.col(1)) * V.col(0);
    n1 = V.col(1).norm();
    if (n1 < 1e-300) return false;
  }
  V.col(1) /= n1;
  return true;
}

} // namespace

void ReservoirSpec::validate() const {
  if (d_r < 1) throw std::invalid_argument("reservoir dimension must be >= 1");
  if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius))
    throw std::invalid_argument("spectral_radius must be positive");
  if (!(input_scaling >= 0.0) || !std::isfinite(input_scaling))
    throw std::invalid_argument("input_scaling must be >= 0");
  if (!std::isfinite(bias)) throw std::invalid_argument("bias must be finite");
  if (avg_degree < 1 || avg_degree > d_r)
    throw std::invalid_argument("avg_degree must be in [1, d_r]");
}

double spectral_radius(const SparseMat& W, std::uint64_t seed) {
  if (W.rows() != W.cols()) throw std::invalid_argument("matrix must be square");
  const Eigen::Index n = W.rows();
  if (n == 0) throw std::invalid_argument("matrix must be non-empty");
  if (n == 1) return std::abs(W.coeff(0, 0));

  Rng rng(seed);
  Mat V(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    V(i, 0) = rng.uniform(-1.0, 1.0);
    V(i, 1) = rng.uniform(-1.0, 1.0);
  }
  if (!orthonormalize(V, rng)) return 0.0;

  double estimate = -1.0;
  for (int iter = 0; iter < kSrMaxIters; ++iter) {
    Mat Y = W * V;
    if (Y.norm() < 1e-150) return 0.0; // iterates collapse: nilpotent-like
    // Rayleigh quotient on the current orthonormal block.
    const Mat B = V.transpose() * Y;
    const double next = dominant_modulus_2x2(B(0, 0), B(0, 1), B(1, 0), B(1, 1));
    if (estimate >= 0.0 && std::abs(next - estimate) <= kSrTol * std::max(next, 1e-30)) {
      return next;
    }
    estimate = next;
    V = Y;
    if (!orthonormalize(V, rng)) return 0.0;
  }
  throw std::runtime_error("spectral radius estimate did not converge");
}

Reservoir build_reservoir(const ReservoirSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.d_r;
  const double p = static_cast<double>(spec.avg_degree) / static_cast<double>(spec.d_r);

  Reservoir res;
  res.spec = spec;

  constexpr int kMaxAttempts = 10;
  bool built = false;
  for (int attempt = 0; attempt < kMaxAttempts && !built; ++attempt) {
    const std::uint64_t attempt_seed = spec.seed + static_cast<std::uint64_t>(attempt);
    Rng rng(derive_seed(attempt_seed, 0));
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n) * 1.2) + 16);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (rng.uniform() < p) triplets.emplace_back(i, j, rng.uniform(-1.0, 1.0));
      }
    }
    SparseMat W(n, n);
    W.setFromTriplets(triplets.begin(), triplets.end());
    const double sr = spectral_radius(W, derive_seed(attempt_seed, 2));
    if (sr > 0.0) {
      W *= spec.spectral_radius / sr;
      res.W = std::move(W);
      built = true;
    }
  }
  if (!built)
    throw std::runtime_error("sampled connectivity has zero spectral radius after 10 attempts");

  Rng rng_w(derive_seed(spec.seed, 1));
  res.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    res.w[i] = rng_w.uniform(-spec.input_scaling, spec.input_scaling);
  res.b_vec = Vec::Constant(n, spec.bias);
  return res;
}

StateMatrix drive(const Reservoir& res, const Vec& u, const Vec& r0) {
  if (r0.size() != res.W.rows()) throw std::invalid_argument("r0 has wrong dimension");
  if (!r0.allFinite()) throw std::invalid_argument("r0 must be finite");
  if (!u.allFinite()) throw std::invalid_argument("input series must be finite");

  const Eigen::Index T = u.size();
  StateMatrix states(res.W.rows(), T);
  Vec r = r0;
  Vec pre(res.W.rows());
  for (Eigen::Index t = 0; t < T; ++t) {
    pre.noalias() = res.W * r;
    pre += u[t] * res.w + res.b_vec;
    r = pre.array().tanh();
    states.col(t) = r;
  }
  return states;
}

ListenResult listen(const Reservoir& res, const Vec& u, const Vec& r0,
                    double washout_fraction) {
  if (!(washout_fraction >= 0.0 && washout_fraction < 1.0))
    throw std::invalid_argument("washout_fraction must be in [0, 1)");
  StateMatrix full = drive(res, u, r0);
  const auto discard = static_cast<Eigen::Index>(
      std::floor(washout_fraction * static_cast<double>(full.cols())));
  const Eigen::Index kept = full.cols() - discard;
  if (kept < 1) throw std::runtime_error("washout leaves no retained states");
  ListenResult out;
  out.states = full.rightCols(kept);
  out.offset = discard;
  return out;
}

void save_reservoir(const Reservoir& res, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream wf(fs::path(dir) / "W.csv");
  wf << "row,col,value\n";
  for (int k = 0; k < res.W.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(res.W, k); it; ++it) {
      wf << it.row() << "," << it.col() << "," << fmt17(it.value()) << "\n";
    }
  }

  auto write_vec = [&](const char* name, const Vec& v) {
    std::ofstream f(fs::path(dir) / name);
    f << "value\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) f << fmt17(v[i]) << "\n";
  };
  write_vec("w.csv", res.w);
  write_vec("b.csv", res.b_vec);

  std::ofstream sf(fs::path(dir) / "spec.csv");
  sf << "key,value\n";
  sf << "d_r," << res.spec.d_r << "\n";
  sf << "spectral_radius," << fmt17(res.spec.spectral_radius) << "\n";
  sf << "input_scaling," << fmt17(res.spec.input_scaling) << "\n";
  sf << "bias," << fmt17(res.spec.bias) << "\n";
  sf << "avg_degree," << res.spec.avg_degree << "\n";
  sf << "seed," << res.spec.seed << "\n";
}

Reservoir load_reservoir(const std::string& dir) {
  namespace fs = std::filesystem;
  auto open = [](const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return f;
  };

  Reservoir res;
  {
    auto f = open(fs::path(dir) / "spec.csv");
    std::string line;
    std::getline(f, line); // header
    while (std::getline(f, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const std::string key = line.substr(0, comma);
      const std::string value = line.substr(comma + 1);
      if (key == "d_r") res.spec.d_r = std::stoi(value);
      else if (key == "spectral_radius") res.spec.spectral_radius = std::stod(value);
      else if (key == "input_scaling") res.spec.input_scaling = std::stod(value);
      else if (key == "bias") res.spec.bias = std::stod(value);
      else if (key == "avg_degree") res.spec.avg_degree = std::stoi(value);
      else if (key == "seed") res.spec.seed = std::stoull(value);
    }
  }

  auto read_vec = [&](const char* name) {
    auto f = open(fs::path(dir) / name);
    std::string line;
    std::getline(f, line); // header
    std::vector<double> vals;
    while (std::getline(f, line)) {
      if (!line.empty()) vals.push_back(std::stod(line));
    }
    return Vec(Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  };
  res.w = read_vec("w.csv");
  res.b_vec = read_vec("b.csv");

  {
    auto f = open(fs::path(dir) / "W.csv");
    std::string line;
    std::getline(f, line); // header
    std::vector<Eigen::Triplet<double>> triplets;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      triplets.emplace_back(std::stoll(line.substr(0, c1)),
                            std::stoll(line.substr(c1 + 1, c2 - c1 - 1)),
                            std::stod(line.substr(c2 + 1)));
    }
    SparseMat W(res.spec.d_r, res.spec.d_r);
    W.setFromTriplets(triplets.begin(), triplets.end());
    res.W = std::move(W);
  }
  return res;
}

} // namespace rcsync
