#include "subspace_glr/covariance.hpp"

#include <cmath>

#include "subspace_glr/errors.hpp"

namespace subspace_glr {

namespace {

constexpr double kHermitianTol = 1e-8;

void require_square(const CMatrix& m, Eigen::Index l, const char* name) {
  if (m.rows() != l || m.cols() != l)
    throw Error(ErrorKind::invalid_dimension, std::string(name) + " must be " + std::to_string(l) +
                                                  "x" + std::to_string(l));
}

CMatrix congruence(const CMatrix& u, const CMatrix& a) {
  return linalg::hermitian_part(u.adjoint() * a * u);
}

}  // namespace

BlockSampleCov BlockSampleCov::from_blocks(CMatrix s_ss, CMatrix s_sr, CMatrix s_rr, Eigen::Index n) {
  const Eigen::Index l = s_ss.rows();
  if (l == 0) throw Error(ErrorKind::invalid_dimension, "sample covariance blocks are empty");
  require_square(s_ss, l, "S_ss");
  require_square(s_sr, l, "S_sr");
  require_square(s_rr, l, "S_rr");
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "snapshot count must be >= 1");
  if (linalg::hermitian_defect(s_ss) > kHermitianTol || linalg::hermitian_defect(s_rr) > kHermitianTol)
    throw Error(ErrorKind::invalid_argument, "diagonal blocks of S must be Hermitian");

  BlockSampleCov s;
  s.s_ss_ = linalg::hermitian_part(s_ss);
  s.s_sr_ = std::move(s_sr);
  s.s_rr_ = linalg::hermitian_part(s_rr);
  s.n_ = n;
  if (!s.rank_warning()) {
    // Throws if either block failed to come out positive definite.
    linalg::Cholesky(s.s_ss_, "S_ss");
    linalg::Cholesky(s.s_rr_, "S_rr");
  }
  return s;
}

CMatrix BlockSampleCov::full() const {
  const Eigen::Index l = antennas();
  CMatrix s(2 * l, 2 * l);
  s << s_ss_, s_sr_, s_sr_.adjoint(), s_rr_;
  return s;
}

BlockSampleCov BlockSampleCov::scaled(cplx c_s, cplx c_r) const {
  return from_blocks(std::norm(c_s) * s_ss_, c_s * std::conj(c_r) * s_sr_, std::norm(c_r) * s_rr_, n_);
}

BlockSampleCov sample_cov(const SnapshotData& data) {
  data.validate();
  const double inv_n = 1.0 / static_cast<double>(data.snapshots());
  return BlockSampleCov::from_blocks(inv_n * data.y_s * data.y_s.adjoint(),
                                     inv_n * data.y_s * data.y_r.adjoint(),
                                     inv_n * data.y_r * data.y_r.adjoint(), data.snapshots());
}

CMatrix unitary_completion(const CVector& u) {
  const Eigen::Index l = u.size();
  if (l == 0) throw Error(ErrorKind::invalid_dimension, "cannot complete an empty vector");
  if (std::abs(u.norm() - 1.0) > 1e-8)
    throw Error(ErrorKind::invalid_argument, "unitary completion needs a unit-norm vector");
  if (l == 1) return CMatrix(1, 0);

  // Rotate u so its first entry is real and nonnegative, then reflect e1 onto
  // -u'. w[0] = 1 + |u0| >= 1, so no cancellation.
  const double mag0 = std::abs(u[0]);
  const cplx phase = mag0 > 0.0 ? u[0] / mag0 : cplx(1.0, 0.0);
  CVector w = std::conj(phase) * u;
  w[0] += 1.0;
  const double w2 = w.squaredNorm();
  CMatrix h = CMatrix::Identity(l, l) - (2.0 / w2) * (w * w.adjoint());
  return h.rightCols(l - 1);
}

CMatrix unitary_basis(const CVector& u) {
  const Eigen::Index l = u.size();
  CMatrix basis(l, l);
  basis.col(0) = u;
  if (l > 1) basis.rightCols(l - 1) = unitary_completion(u);
  else if (std::abs(u.norm() - 1.0) > 1e-8)
    throw Error(ErrorKind::invalid_argument, "unitary completion needs a unit-norm vector");
  return basis;
}

ChannelFactors::ChannelFactors(const BlockSampleCov& s)
    : s_(s), ss_(s.s_ss(), "S_ss"), rr_(s.s_rr(), "S_rr") {
  if (s.rank_warning())
    throw Error(ErrorKind::degenerate_sample,
                "N = " + std::to_string(s.snapshots()) + " < 2L; sample blocks may be singular");
}

cplx eta_sr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr) {
  const linalg::Cholesky ss(s.s_ss(), "S_ss");
  const linalg::Cholesky rr(r_rr, "R_rr");
  return ss.solve(u_s).dot(s.s_sr() * rr.solve(u_r));
}

double eta_rr(const BlockSampleCov& s, const CVector& u_r, const CMatrix& r_rr) {
  const linalg::Cholesky rr(r_rr, "R_rr");
  return linalg::quadratic(s.s_rr(), rr.solve(u_r));
}

double alpha_sr(const BlockSampleCov& s, const CVector& /*u_s*/, const CVector& u_r,
                const CMatrix& r_rr) {
  const linalg::Cholesky ss(s.s_ss(), "S_ss");
  const linalg::Cholesky rr(r_rr, "R_rr");
  return ss.whiten(CVector(s.s_sr() * rr.solve(u_r))).squaredNorm();
}

SampleForms sample_forms(const ChannelFactors& f, const CVector& u_s, const CVector& u_r) {
  const CVector p = f.ss().solve(u_s);
  const CVector r = f.rr().solve(u_r);
  const CVector sr_r = f.cov().s_sr() * r;
  SampleForms out;
  out.eta_sr = p.dot(sr_r);
  out.alpha_sr = f.ss().whiten(sr_r).squaredNorm();
  out.us_inv_us = u_s.dot(p).real();
  out.ur_inv_ur = u_r.dot(r).real();
  return out;
}

ReducedForms build_reduced_forms(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  return build_reduced_forms(s, u_s, unitary_basis(u_r));
}

ReducedForms build_reduced_forms(const BlockSampleCov& s, const CVector& u_s, const CMatrix& u_r_full) {
  const Eigen::Index l = s.antennas();
  require_square(u_r_full, l, "U_r");
  if (u_s.size() != l) throw Error(ErrorKind::invalid_dimension, "u_s length differs from L");
  const double unitary_err = (u_r_full.adjoint() * u_r_full - CMatrix::Identity(l, l)).norm();
  if (unitary_err > 1e-10) throw Error(ErrorKind::invalid_argument, "U_r is not unitary");

  const linalg::Cholesky ss(s.s_ss(), "S_ss");
  const CMatrix w = ss.whiten(s.s_sr());      // L^{-1} S_sr
  const CVector us_w = ss.whiten(u_s);        // L^{-1} u_s
  const double us_inv_us = us_w.squaredNorm();
  const CMatrix schur = linalg::hermitian_part(s.s_rr() - w.adjoint() * w);
  const CVector v = w.adjoint() * us_w;       // S_sr^H S_ss^{-1} u_s

  ReducedForms rf;
  rf.u_r_full = u_r_full;
  rf.xi = congruence(u_r_full, s.s_rr());
  rf.gamma = congruence(u_r_full, schur);
  rf.psi = congruence(u_r_full, us_inv_us * schur + v * v.adjoint());
  return rf;
}

BeamformerPair capon_pair(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  const linalg::Cholesky ss(s.s_ss(), "S_ss");
  const linalg::Cholesky rr(s.s_rr(), "S_rr");
  const CVector p_s = ss.solve(u_s);
  const CVector p_r = rr.solve(u_r);
  const double a_s = u_s.dot(p_s).real();
  const double a_r = u_r.dot(p_r).real();

  BeamformerPair bf;
  bf.b_s = p_s / a_s;
  bf.b_r = p_r / a_r;
  bf.w_s = linalg::inverse_sqrt(s.s_ss(), "S_ss") * u_s / std::sqrt(a_s);
  bf.w_r = linalg::inverse_sqrt(s.s_rr(), "S_rr") * u_r / std::sqrt(a_r);
  return bf;
}

CMatrix coherence_matrix(const BlockSampleCov& s) {
  return linalg::inverse_sqrt(s.s_ss(), "S_ss") * s.s_sr() * linalg::inverse_sqrt(s.s_rr(), "S_rr");
}

}  // namespace subspace_glr
