#pragma once

#include <cstdint>
#include <random>

namespace rcsync {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer (Vigna). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the `index`-th substream under `base`.
///
/// This is the project-wide seed splitting rule: the state offsets
/// (index+1)*gamma are distinct modulo 2^64 (gamma is odd) and mix64 is a
/// bijection, so two distinct indices can never map to the same seed under
/// a fixed base. Used both for per-run seeds inside a sweep (index = flat
/// run index) and for named substreams inside a run (index = stream tag).
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + (index + 1) * kGoldenGamma);
}

// Stream tags for the substreams of one run.
enum StreamTag : std::uint64_t {
  kStreamSourceInit = 0,  // random initial condition of the source system
  kStreamReservoir = 1,   // reservoir realization (W, w)
  kStreamReplicaInit = 2, // second initial condition of the replica test
  kStreamNoise = 3,       // measurement-noise draws
  kStreamFreshTraj = 4,   // fresh trajectories of the ergodicity check
};

/// Seeded generator with a portable uniform double in the open interval (0,1).
/// The open interval matters: sampled weights must stay strictly inside
/// (-omega, omega) and matrix entries strictly inside (-1, 1).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0,1), both endpoints excluded.
  double uniform() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
  }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

private:
  std::mt19937_64 engine_;
};

} // namespace rcsync
