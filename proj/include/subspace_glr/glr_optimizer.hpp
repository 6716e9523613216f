#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "subspace_glr/covariance.hpp"
#include "subspace_glr/types.hpp"

namespace subspace_glr {

/// Hermitian PD matrices of the compressed cost
///   J(x) = log(x^H E x / x^H Xi x) + log(x^H Psi x / x^H Gamma x),
/// E = diag(1, 0, ..., 0).
class CostContext {
 public:
  /// Throws ErrorKind::not_positive_definite if any matrix is not PD.
  CostContext(CMatrix xi, CMatrix psi, CMatrix gamma);
  explicit CostContext(const ReducedForms& rf) : CostContext(rf.xi, rf.psi, rf.gamma) {}

  const CMatrix& xi() const { return xi_; }
  const CMatrix& psi() const { return psi_; }
  const CMatrix& gamma() const { return gamma_; }
  Eigen::Index dim() const { return xi_.rows(); }

 private:
  CMatrix xi_;
  CMatrix psi_;
  CMatrix gamma_;
};

struct TrustRegionOptions {
  int max_iter = 200;
  double grad_tol = 1e-8;
  double initial_radius = 0.5;
  double min_radius = 1e-12;
  double accept_ratio = 0.1;
  /// Extra runs from random starts; the best J wins. Off by default.
  int restarts = 0;
  std::uint64_t restart_seed = 0x5eed;

  void validate() const;
};

struct OptimResult {
  CVector x_hat;  // unit norm, x_hat[0] real and >= 0
  double j_value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> j_trace;  // J at the start and after every accepted step
};

/// J(x); -inf when x[0] == 0. Invariant to x -> c x for complex c != 0.
double cost_j(const CVector& x, const CostContext& ctx);

/// Gradient and Hessian of J in the real coordinates (Re x, Im x).
RVector grad_j(const CVector& x, const CostContext& ctx);
RMatrix hess_j(const CVector& x, const CostContext& ctx);

/// Unit norm, first entry rotated onto the nonnegative real axis.
CVector canonicalize(const CVector& x);

/// Normalized first column of U_r^H S_rr^{-1} U_r, canonicalized. This is the
/// x implied by R_rr = S_rr.
CVector init_x(const CMatrix& s_rr, const CMatrix& u_r_full);

/// Trust-region ascent of J on the unit sphere modulo phase. Each iteration
/// works in the 2L - 2 real directions orthogonal to the scale and phase
/// invariances, takes the exact Hessian model, and solves the trust-region
/// subproblem by eigendecomposition. Accepted steps never decrease J.
/// Throws ErrorKind::invalid_initialization when J(x0) is not finite.
OptimResult maximize_j(const CostContext& ctx, const CVector& x0, const TrustRegionOptions& opts = {});

}  // namespace subspace_glr
