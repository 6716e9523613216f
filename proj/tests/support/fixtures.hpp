#pragma once

#include <cstdint>

#include "subspace_glr/covariance.hpp"
#include "subspace_glr/model.hpp"
#include "subspace_glr/rng.hpp"

namespace subspace_glr::testing {

struct Instance {
  SteeringPair steering;
  SnapshotData data;
  BlockSampleCov s;
};

/// One draw of the simulation model with random-unit steering.
Instance random_instance(std::uint64_t seed, int antennas, int snapshots, Hypothesis h = Hypothesis::h1,
                         double snr_s_db = 0.0, double snr_r_db = 10.0);

/// Same sample covariance with the cross block replaced by zeros.
BlockSampleCov without_cross(const BlockSampleCov& s);

CMatrix random_unitary(Rng& rng, Eigen::Index n);
CMatrix random_pd(Rng& rng, Eigen::Index n);

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace subspace_glr::testing
