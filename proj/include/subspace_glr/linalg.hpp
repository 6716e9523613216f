#pragma once

#include <string>

#include "subspace_glr/types.hpp"

namespace subspace_glr::linalg {

/// A <- (A + A^H) / 2.
CMatrix hermitian_part(const CMatrix& a);

/// max |A - A^H| relative to max |A| (0 for the zero matrix).
double hermitian_defect(const CMatrix& a);

double min_eigenvalue(const CMatrix& hermitian);

/// Cholesky factor of a Hermitian positive-definite matrix. Throws
/// ErrorKind::not_positive_definite naming `what` when the factorization fails.
class Cholesky {
 public:
  Cholesky(const CMatrix& a, const std::string& what);

  /// A^{-1} b
  CMatrix solve(const CMatrix& b) const { return llt_.solve(b); }
  CVector solve(const CVector& b) const { return llt_.solve(b); }
  /// L^{-1} b, so that (L^{-1} b)^H (L^{-1} b) = b^H A^{-1} b.
  CMatrix whiten(const CMatrix& b) const;
  CVector whiten(const CVector& b) const;
  /// b^H A^{-1} b
  double inverse_quadratic(const CVector& b) const;
  double log_det() const;
  const CMatrix& factor() const { return factor_; }

 private:
  Eigen::LLT<CMatrix> llt_;
  CMatrix factor_;
};

/// Hermitian PSD inverse square root A^{-1/2} via eigendecomposition.
CMatrix inverse_sqrt(const CMatrix& hermitian_pd, const std::string& what);

/// x^H A x, real part (A Hermitian).
double quadratic(const CMatrix& a, const CVector& x);

}  // namespace subspace_glr::linalg
