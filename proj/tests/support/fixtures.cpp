#include "fixtures.hpp"

namespace subspace_glr::testing {

Instance random_instance(std::uint64_t seed, int antennas, int snapshots, Hypothesis h, double snr_s_db,
                         double snr_r_db) {
  ScenarioConfig cfg;
  cfg.antennas = antennas;
  cfg.snapshots = snapshots;
  cfg.snr_s_db = snr_s_db;
  cfg.snr_r_db = snr_r_db;
  cfg.seed = seed;
  Rng steer(seed, 0, DrawPurpose::steering);
  Rng gains(seed, 0, DrawPurpose::gains);
  Rng noise(seed, 0, DrawPurpose::noise_covariance);
  Rng snaps(seed, 0, DrawPurpose::snapshots);
  SteeringPair steering = draw_steering(steer, antennas, SteeringMode::random_unit);
  const ChannelRealization chan = draw_channel(gains, noise, cfg);
  SnapshotData data = synth_snapshots(cfg, steering, chan, h, snaps);
  BlockSampleCov s = sample_cov(data);
  return {std::move(steering), std::move(data), std::move(s)};
}

BlockSampleCov without_cross(const BlockSampleCov& s) {
  return BlockSampleCov::from_blocks(s.s_ss(), CMatrix::Zero(s.antennas(), s.antennas()), s.s_rr(),
                                     s.snapshots());
}

CMatrix random_unitary(Rng& rng, Eigen::Index n) {
  const CMatrix g = rng.complex_normal_matrix(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

CMatrix random_pd(Rng& rng, Eigen::Index n) {
  const CMatrix g = rng.complex_normal_matrix(n, 2 * n);
  CMatrix a = g * g.adjoint() / static_cast<double>(2 * n);
  return 0.5 * (a + a.adjoint().eval());
}

}  // namespace subspace_glr::testing
