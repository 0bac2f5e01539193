#pragma once

#include "irsfd/linalg.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace irsfd {

/// 64-bit Mersenne Twister with helpers for circularly-symmetric complex
/// Gaussian draws. Substreams are derived deterministically from a master
/// seed and a path of indices, so results never depend on worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (master, path...).
  static Rng substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  double uniform();           ///< U[0, 1)
  double normal();            ///< N(0, 1)
  cplx complex_normal();      ///< CN(0, 1): real and imaginary parts N(0, 1/2)
  Mat complex_normal(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace irsfd
