#pragma once

#include "subspace_glr/linalg.hpp"
#include "subspace_glr/model.hpp"
#include "subspace_glr/types.hpp"

namespace subspace_glr {

/// Partitioned sample covariance S = (1/N) Y Y^H of the stacked
/// [Y_s; Y_r] data.
class BlockSampleCov {
 public:
  /// Builds from blocks, Hermitian-symmetrizing s_ss and s_rr. Throws if a
  /// diagonal block is far from Hermitian, or if n >= 2L and a diagonal
  /// block is not positive definite.
  static BlockSampleCov from_blocks(CMatrix s_ss, CMatrix s_sr, CMatrix s_rr, Eigen::Index n);

  const CMatrix& s_ss() const { return s_ss_; }
  const CMatrix& s_sr() const { return s_sr_; }
  const CMatrix& s_rr() const { return s_rr_; }
  Eigen::Index snapshots() const { return n_; }
  Eigen::Index antennas() const { return s_ss_.rows(); }

  /// N < 2L: the diagonal blocks may be singular and detectors refuse the
  /// sample.
  bool rank_warning() const { return n_ < 2 * antennas(); }

  CMatrix full() const;

  /// Rescales the channels as Y_s -> c_s Y_s, Y_r -> c_r Y_r.
  BlockSampleCov scaled(cplx c_s, cplx c_r) const;

 private:
  CMatrix s_ss_;
  CMatrix s_sr_;
  CMatrix s_rr_;
  Eigen::Index n_ = 0;
};

BlockSampleCov sample_cov(const SnapshotData& data);

/// L x (L-1) matrix V with [u V] unitary, from a Householder reflector.
/// Deterministic in u; L = 1 gives an empty L x 0 matrix.
CMatrix unitary_completion(const CVector& u);

/// U = [u V]
CMatrix unitary_basis(const CVector& u);

/// Cholesky factors of S_ss and S_rr shared by every statistic.
class ChannelFactors {
 public:
  explicit ChannelFactors(const BlockSampleCov& s);

  const BlockSampleCov& cov() const { return s_; }
  const linalg::Cholesky& ss() const { return ss_; }
  const linalg::Cholesky& rr() const { return rr_; }

 private:
  BlockSampleCov s_;
  linalg::Cholesky ss_;
  linalg::Cholesky rr_;
};

/// u_s^H S_ss^{-1} S_sr R_rr^{-1} u_r
cplx eta_sr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr);
/// u_r^H R_rr^{-1} S_rr R_rr^{-1} u_r
double eta_rr(const BlockSampleCov& s, const CVector& u_r, const CMatrix& r_rr);
/// u_r^H R_rr^{-1} S_sr^H S_ss^{-1} S_sr R_rr^{-1} u_r
double alpha_sr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr);

/// The three scalar forms evaluated at R_rr = S_rr, plus the two
/// u^H S^{-1} u normalizers, computed with shared factorizations.
struct SampleForms {
  cplx eta_sr;
  double alpha_sr;
  double us_inv_us;  // u_s^H S_ss^{-1} u_s
  double ur_inv_ur;  // u_r^H S_rr^{-1} u_r
};

SampleForms sample_forms(const ChannelFactors& f, const CVector& u_s, const CVector& u_r);

/// Matrices of the compressed cost: Xi = U^H S_rr U, Gamma = U^H (S_rr -
/// S_sr^H S_ss^{-1} S_sr) U and Psi = U^H [(u_s^H S_ss^{-1} u_s) (S_rr -
/// S_sr^H S_ss^{-1} S_sr) + S_sr^H S_ss^{-1} u_s u_s^H S_ss^{-1} S_sr] U,
/// with U = [u_r V_r]. The selector E = diag(1, 0, ..., 0) is implicit.
struct ReducedForms {
  CMatrix u_r_full;
  CMatrix xi;
  CMatrix psi;
  CMatrix gamma;
};

ReducedForms build_reduced_forms(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r);
/// Same with a caller-supplied unitary U whose first column is u_r.
ReducedForms build_reduced_forms(const BlockSampleCov& s, const CVector& u_s, const CMatrix& u_r_full);

struct BeamformerPair {
  CVector b_s;  // Capon, u^H b = 1
  CVector b_r;
  CVector w_s;  // whitened matched filters, unit norm
  CVector w_r;
};

BeamformerPair capon_pair(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r);

/// C = S_ss^{-1/2} S_sr S_rr^{-1/2} with Hermitian inverse square roots.
CMatrix coherence_matrix(const BlockSampleCov& s);

}  // namespace subspace_glr
