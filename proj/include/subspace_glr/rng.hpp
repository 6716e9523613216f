#pragma once

#include <cstdint>
#include <random>

#include "subspace_glr/types.hpp"

namespace subspace_glr {

/// What a substream is used for. Keeping purposes separate means adding a
/// draw to one stage never shifts the variates of another.
enum class DrawPurpose : std::uint64_t {
  steering = 1,
  gains = 2,
  noise_covariance = 3,
  snapshots = 4,
  restarts = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream keyed by (seed, index, purpose). Pure function of its
/// arguments, so trials can be evaluated in any order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, DrawPurpose purpose);

/// Seeded random stream: a 64-bit Mersenne Twister plus the distributions the
/// simulation needs. Not thread-safe; give each task its own instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t index, DrawPurpose purpose)
      : engine_(derive_seed(seed, index, purpose)) {}

  /// Proper complex Gaussian CN(0, 1): real and imaginary parts N(0, 1/2).
  cplx complex_normal();
  double normal() { return standard_(engine_); }
  double uniform(double lo, double hi);

  CVector complex_normal_vector(Eigen::Index n);
  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_{0.0, 1.0};
};

}  // namespace subspace_glr
