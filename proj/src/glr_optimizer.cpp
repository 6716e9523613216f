#include "subspace_glr/glr_optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "subspace_glr/errors.hpp"
#include "subspace_glr/linalg.hpp"
#include "subspace_glr/rng.hpp"

namespace subspace_glr {

namespace {

constexpr double kMaxRadius = 100.0;

RVector stack(const CVector& x) {
  RVector z(2 * x.size());
  z << x.real(), x.imag();
  return z;
}

CVector unstack(const RVector& z) {
  const Eigen::Index l = z.size() / 2;
  CVector x(l);
  for (Eigen::Index i = 0; i < l; ++i) x[i] = cplx(z[i], z[l + i]);
  return x;
}

/// Real symmetric embedding of a Hermitian matrix acting on (Re x, Im x).
RMatrix real_embedding(const CMatrix& a) {
  const Eigen::Index l = a.rows();
  RMatrix m(2 * l, 2 * l);
  m << a.real(), -a.imag(), a.imag(), a.real();
  return m;
}

struct LogQuadTerm {
  const CMatrix* a;  // nullptr stands for E
  double sign;
};

double quad_form(const CMatrix* a, const CVector& x) {
  return a ? linalg::quadratic(*a, x) : std::norm(x[0]);
}

CVector apply(const CMatrix* a, const CVector& x) {
  if (a) return *a * x;
  CVector e = CVector::Zero(x.size());
  e[0] = x[0];
  return e;
}

std::array<LogQuadTerm, 4> terms(const CostContext& ctx) {
  return {{{nullptr, 1.0}, {&ctx.xi(), -1.0}, {&ctx.psi(), 1.0}, {&ctx.gamma(), -1.0}}};
}

void require_dim(const CVector& x, const CostContext& ctx) {
  if (x.size() != ctx.dim())
    throw Error(ErrorKind::invalid_dimension, "x has length " + std::to_string(x.size()) +
                                                  ", cost expects " + std::to_string(ctx.dim()));
}

/// Minimizes c^T s + s^T A s / 2 over ||s|| <= radius.
RVector solve_subproblem(const RVector& c, const RMatrix& a, double radius) {
  const Eigen::Index n = c.size();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(a);
  const RVector& lambda = es.eigenvalues();
  const RMatrix& q = es.eigenvectors();
  const RVector beta = q.transpose() * c;

  auto step = [&](double mu) {
    RVector coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) coeff[i] = -beta[i] / (lambda[i] + mu);
    return coeff;
  };

  if (lambda[0] > 0.0) {
    const RVector newton = step(0.0);
    if (newton.norm() <= radius) return q * newton;
  }

  const double lo = std::max(0.0, -lambda[0]);
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double cnorm = c.norm();

  // Hard case: c has (numerically) no component along the leftmost
  // eigenvectors, so no mu > lo reaches the boundary.
  bool hard = true;
  RVector partial = RVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda[i] - lambda[0] <= 1e-12 * scale) {
      if (std::abs(beta[i]) > 1e-12 * std::max(cnorm, 1e-300)) hard = false;
    } else {
      partial[i] = -beta[i] / (lambda[i] + lo);
    }
  }
  if (hard && partial.norm() < radius) {
    partial[0] += std::sqrt(radius * radius - partial.squaredNorm());
    return q * partial;
  }

  double mu_lo = lo;
  double mu_hi = lo + cnorm / radius + 1e-300;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (mid <= mu_lo || mid >= mu_hi) break;
    if (step(mid).norm() > radius) mu_lo = mid;
    else mu_hi = mid;
  }
  return q * step(mu_hi);
}

/// J(x + s) - J(x) without the cancellation of differencing two J values:
/// each term contributes log1p((2 Re x^H A s + s^H A s) / x^H A x).
double cost_increment(const CostContext& ctx, const CVector& x, const CVector& s) {
  double d = 0.0;
  for (const auto& t : terms(ctx)) {
    const double q = quad_form(t.a, x);
    const double dq = 2.0 * x.dot(apply(t.a, s)).real() + quad_form(t.a, s);
    d += t.sign * std::log1p(dq / q);
  }
  return d;
}

/// Orthonormal basis of the 2L - 2 real directions orthogonal to x and jx.
RMatrix horizontal_basis(const CVector& x) {
  const Eigen::Index n = 2 * x.size();
  RMatrix frame(n, 2);
  frame.col(0) = stack(x);
  frame.col(1) = stack(CVector(cplx(0.0, 1.0) * x));
  const RMatrix q_full = Eigen::HouseholderQR<RMatrix>(frame).householderQ();
  return q_full.rightCols(n - 2);
}

OptimResult run_single(const CostContext& ctx, const CVector& start, const TrustRegionOptions& opts) {
  OptimResult res;
  double j = cost_j(start, ctx);
  CVector x = canonicalize(start);
  if (!std::isfinite(j))
    throw Error(ErrorKind::invalid_initialization, "J(x0) is not finite (x0[0] = 0?)");
  res.j_trace.push_back(j);

  double radius = opts.initial_radius;
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    const RMatrix basis = horizontal_basis(x);
    const RVector g = basis.transpose() * grad_j(x, ctx);
    if (g.norm() <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    if (radius < opts.min_radius) break;

    const RMatrix h = basis.transpose() * hess_j(x, ctx) * basis;
    const RVector s = solve_subproblem(-g, -h, radius);
    const double predicted = g.dot(s) + 0.5 * s.dot(h * s);
    const CVector step = unstack(basis * s);
    const double gain = cost_increment(ctx, x, step);

    const double rho = (predicted > 0.0 && std::isfinite(gain)) ? gain / predicted : -1.0;
    const double step_norm = s.norm();
    if (rho < 0.25) radius = 0.25 * step_norm;
    else if (rho > 0.75 && step_norm >= 0.99 * radius) radius = std::min(2.0 * radius, kMaxRadius);

    if (rho > opts.accept_ratio && gain >= 0.0) {
      x = canonicalize(x + step);
      j += gain;
      res.j_trace.push_back(j);
    }
  }
  if (!res.converged)
    res.converged = (horizontal_basis(x).transpose() * grad_j(x, ctx)).norm() <= opts.grad_tol;
  res.x_hat = x;
  res.j_value = j;
  return res;
}

}  // namespace

CostContext::CostContext(CMatrix xi, CMatrix psi, CMatrix gamma)
    : xi_(linalg::hermitian_part(xi)), psi_(linalg::hermitian_part(psi)), gamma_(linalg::hermitian_part(gamma)) {
  const Eigen::Index l = xi_.rows();
  if (l == 0 || xi_.cols() != l || psi_.rows() != l || psi_.cols() != l || gamma_.rows() != l ||
      gamma_.cols() != l)
    throw Error(ErrorKind::invalid_dimension, "cost matrices must be square and of equal size");
  linalg::Cholesky(xi_, "Xi");
  linalg::Cholesky(psi_, "Psi");
  linalg::Cholesky(gamma_, "Gamma");
}

void TrustRegionOptions::validate() const {
  auto bad = [](const char* field, const char* msg) {
    throw Error(ErrorKind::invalid_argument, std::string("optimizer.") + field + ": " + msg);
  };
  if (max_iter < 1) bad("max_iter", "must be >= 1");
  if (!(grad_tol > 0.0)) bad("grad_tol", "must be > 0");
  if (!(initial_radius > 0.0)) bad("initial_radius", "must be > 0");
  if (!(min_radius > 0.0)) bad("min_radius", "must be > 0");
  if (!(accept_ratio > 0.0 && accept_ratio < 1.0)) bad("accept_ratio", "must lie in (0, 1)");
  if (restarts < 0) bad("restarts", "must be >= 0");
}

double cost_j(const CVector& x, const CostContext& ctx) {
  require_dim(x, ctx);
  if (x[0] == cplx(0.0, 0.0)) return -std::numeric_limits<double>::infinity();
  double j = 0.0;
  for (const auto& t : terms(ctx)) j += t.sign * std::log(quad_form(t.a, x));
  return j;
}

RVector grad_j(const CVector& x, const CostContext& ctx) {
  require_dim(x, ctx);
  RVector g = RVector::Zero(2 * x.size());
  for (const auto& t : terms(ctx)) {
    const double q = quad_form(t.a, x);
    g += (2.0 * t.sign / q) * stack(apply(t.a, x));
  }
  return g;
}

RMatrix hess_j(const CVector& x, const CostContext& ctx) {
  require_dim(x, ctx);
  const Eigen::Index n = 2 * x.size();
  RMatrix h = RMatrix::Zero(n, n);
  for (const auto& t : terms(ctx)) {
    const double q = quad_form(t.a, x);
    const RVector ax = stack(apply(t.a, x));
    RMatrix a_hat;
    if (t.a) {
      a_hat = real_embedding(*t.a);
    } else {
      a_hat = RMatrix::Zero(n, n);
      a_hat(0, 0) = 1.0;
      a_hat(n / 2, n / 2) = 1.0;
    }
    h += t.sign * ((2.0 / q) * a_hat - (4.0 / (q * q)) * ax * ax.transpose());
  }
  return h;
}

CVector canonicalize(const CVector& x) {
  const double nrm = x.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw Error(ErrorKind::invalid_initialization, "cannot normalize a zero or non-finite vector");
  CVector y = x / nrm;
  const double mag0 = std::abs(y[0]);
  if (mag0 > 0.0) y *= std::conj(y[0]) / mag0;
  y[0] = cplx(y[0].real(), 0.0);
  return y;
}

CVector init_x(const CMatrix& s_rr, const CMatrix& u_r_full) {
  const linalg::Cholesky rr(s_rr, "S_rr");
  const CVector first = u_r_full.adjoint() * rr.solve(CVector(u_r_full.col(0)));
  return canonicalize(first);
}

OptimResult maximize_j(const CostContext& ctx, const CVector& x0, const TrustRegionOptions& opts) {
  opts.validate();
  require_dim(x0, ctx);
  OptimResult best = run_single(ctx, x0, opts);
  for (int k = 0; k < opts.restarts; ++k) {
    Rng rng(opts.restart_seed, static_cast<std::uint64_t>(k), DrawPurpose::restarts);
    OptimResult trial = run_single(ctx, rng.complex_normal_vector(x0.size()), opts);
    if (trial.j_value > best.j_value) best = std::move(trial);
  }
  return best;
}

}  // namespace subspace_glr
