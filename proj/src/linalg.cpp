#include "subspace_glr/linalg.hpp"

#include <cmath>

#include "subspace_glr/errors.hpp"

namespace subspace_glr::linalg {

CMatrix hermitian_part(const CMatrix& a) {
  CMatrix h = 0.5 * (a + a.adjoint());
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = h(i, i).real();
  return h;
}

double hermitian_defect(const CMatrix& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Cholesky::Cholesky(const CMatrix& a, const std::string& what) : llt_(a) {
  if (llt_.info() != Eigen::Success)
    throw Error(ErrorKind::not_positive_definite, what + " is not positive definite");
  factor_ = llt_.matrixL();
  for (Eigen::Index i = 0; i < factor_.rows(); ++i) {
    const double d = factor_(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorKind::not_positive_definite, what + " is numerically singular");
  }
}

CMatrix Cholesky::whiten(const CMatrix& b) const {
  return llt_.matrixL().solve(b);
}

CVector Cholesky::whiten(const CVector& b) const {
  return llt_.matrixL().solve(b);
}

double Cholesky::inverse_quadratic(const CVector& b) const {
  return whiten(b).squaredNorm();
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < factor_.rows(); ++i) s += std::log(factor_(i, i).real());
  return 2.0 * s;
}

CMatrix inverse_sqrt(const CMatrix& hermitian_pd, const std::string& what) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(hermitian_pd));
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::not_positive_definite, what + ": eigendecomposition failed");
  const RVector& lambda = es.eigenvalues();
  if (lambda.size() > 0 && !(lambda(0) > 0.0))
    throw Error(ErrorKind::not_positive_definite, what + " is not positive definite");
  const RVector inv_root = lambda.cwiseSqrt().cwiseInverse();
  const CMatrix& q = es.eigenvectors();
  return hermitian_part(q * inv_root.cast<cplx>().asDiagonal() * q.adjoint());
}

double quadratic(const CMatrix& a, const CVector& x) {
  return x.dot(a * x).real();
}

}  // namespace subspace_glr::linalg
