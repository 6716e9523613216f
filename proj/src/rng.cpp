#include "subspace_glr/rng.hpp"

#include <cmath>

namespace subspace_glr {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, DrawPurpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

cplx Rng::complex_normal() {
  static const double scale = std::sqrt(0.5);
  const double re = standard_(engine_);
  const double im = standard_(engine_);
  return {scale * re, scale * im};
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

CVector Rng::complex_normal_vector(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
  return v;
}

CMatrix Rng::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  // Column-major fill order is part of the reproducibility contract.
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
  return m;
}

}  // namespace subspace_glr
