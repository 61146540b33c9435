#pragma once

#include <cmath>
#include <cstdint>

namespace eoflab {

/// Small self-contained generator (splitmix64 core). Used instead of
/// <random> distributions so that identical seeds reproduce identical
/// streams independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one value per call, cache discarded.
  double normal();

  /// Derive an independent stream for a labelled subtask.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0xd1342543de82ef95ULL * (stream + 1)));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

inline double Rng::normal() {
  // Box-Muller on two fresh uniforms; u clamped away from 0.
  double u = uniform();
  if (u < 1e-300) u = 1e-300;
  double v = uniform();
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(two_pi * v);
}

}  // namespace eoflab
