#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <ceres/ceres.h>

#include "subspace_glr/rng.hpp"

namespace subspace_glr::testing {

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix lower_from_params(const double* p, int l) {
  CMatrix t = CMatrix::Zero(l, l);
  int k = l;
  for (int i = 0; i < l; ++i) {
    t(i, i) = std::exp(p[i]);
    for (int j = 0; j < i; ++j, k += 2) t(i, j) = cplx(p[k], p[k + 1]);
  }
  return t;
}

std::vector<double> params_from_lower(const CMatrix& t) {
  const auto l = static_cast<int>(t.rows());
  std::vector<double> p(static_cast<std::size_t>(l * l));
  int k = l;
  for (int i = 0; i < l; ++i) {
    p[static_cast<std::size_t>(i)] = std::log(t(i, i).real());
    for (int j = 0; j < i; ++j, k += 2) {
      p[static_cast<std::size_t>(k)] = t(i, j).real();
      p[static_cast<std::size_t>(k + 1)] = t(i, j).imag();
    }
  }
  return p;
}

class NegCompressed final : public ceres::FirstOrderFunction {
 public:
  NegCompressed(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r)
      : s_(s), u_s_(u_s), u_r_(u_r), l_(static_cast<int>(s.antennas())) {}

  int NumParameters() const override { return l_ * l_; }

  bool Evaluate(const double* p, double* cost, double* grad) const override {
    *cost = value(p);
    if (!std::isfinite(*cost)) return false;
    if (grad) {
      std::vector<double> q(p, p + NumParameters());
      for (int i = 0; i < NumParameters(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(q[static_cast<std::size_t>(i)]));
        const double keep = q[static_cast<std::size_t>(i)];
        q[static_cast<std::size_t>(i)] = keep + h;
        const double up = value(q.data());
        q[static_cast<std::size_t>(i)] = keep - h;
        const double dn = value(q.data());
        q[static_cast<std::size_t>(i)] = keep;
        grad[i] = (up - dn) / (2.0 * h);
      }
    }
    return true;
  }

  double value(const double* p) const {
    const CMatrix t = lower_from_params(p, l_);
    return -compressed_log_glr(s_, u_s_, u_r_, t * t.adjoint());
  }

 private:
  const BlockSampleCov& s_;
  CVector u_s_;
  CVector u_r_;
  int l_;
};

double solve_from(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, std::vector<double> p) {
  ceres::GradientProblem problem(new NegCompressed(s, u_s, u_r));
  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::BFGS;
  opts.max_num_iterations = 5000;
  opts.function_tolerance = 1e-15;
  opts.gradient_tolerance = 1e-12;
  opts.parameter_tolerance = 1e-14;
  opts.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(opts, problem, p.data(), &summary);
  return -summary.final_cost;
}

double j_l2(const CMatrix& xi, const CMatrix& psi, const CMatrix& gamma, double t, double p) {
  const double c = std::cos(t);
  const double sn = std::sin(t);
  const cplx e = std::polar(1.0, p);
  auto q = [&](const CMatrix& a) {
    return c * c * a(0, 0).real() + sn * sn * a(1, 1).real() + 2.0 * c * sn * (a(0, 1) * e).real();
  };
  return std::log(c * c / q(xi)) + std::log(q(psi) / q(gamma));
}

}  // namespace

double compressed_log_glr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r,
                          const CMatrix& r_rr_inv) {
  const auto l = static_cast<double>(s.antennas());
  const CMatrix ss_inv = s.s_ss().inverse();
  const CVector r = r_rr_inv * u_r;
  const double a_s = (u_s.adjoint() * ss_inv * u_s)(0, 0).real();
  const cplx eta = (u_s.adjoint() * ss_inv * s.s_sr() * r)(0, 0);
  const double e_rr = (r.adjoint() * s.s_rr() * r)(0, 0).real();
  const double alpha = (r.adjoint() * s.s_sr().adjoint() * ss_inv * s.s_sr() * r)(0, 0).real();
  const double logdet_rinv = std::log(r_rr_inv.determinant().real());
  const double logdet_srr = std::log(s.s_rr().determinant().real());
  const double tr = (r_rr_inv * s.s_rr()).trace().real();
  return -std::log(a_s) + std::log(a_s + std::norm(eta) / (e_rr - alpha)) + logdet_rinv - tr + logdet_srr + l;
}

double oracle_glr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, int restarts,
                  std::uint64_t seed) {
  const CMatrix start = CMatrix(s.s_rr().inverse()).llt().matrixL();
  double best = solve_from(s, u_s, u_r, params_from_lower(start));
  const auto l = static_cast<int>(s.antennas());
  for (int k = 0; k < restarts; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k), DrawPurpose::restarts);
    std::vector<double> p = params_from_lower(start);
    for (int i = 0; i < l; ++i) p[static_cast<std::size_t>(i)] += rng.uniform(-1.0, 1.0);
    const double spread = std::abs(start(0, 0));
    for (std::size_t i = static_cast<std::size_t>(l); i < p.size(); ++i) p[i] += spread * rng.normal();
    best = std::max(best, solve_from(s, u_s, u_r, std::move(p)));
  }
  return std::exp(best);
}

GridMax grid_max_j_l2(const CMatrix& xi, const CMatrix& psi, const CMatrix& gamma) {
  GridMax best{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  auto scan = [&](double t0, double t1, double p0, double p1, int n) {
    const double dt = (t1 - t0) / n;
    const double dp = (p1 - p0) / n;
    GridMax local = best;
    for (int i = 0; i <= n; ++i) {
      const double t = std::clamp(t0 + i * dt, 0.0, kPi / 2 - 1e-12);
      for (int k = 0; k <= n; ++k) {
        const double p = p0 + k * dp;
        const double j = j_l2(xi, psi, gamma, t, p);
        if (j > local.j) local = {j, t, p};
      }
    }
    best = local;
    return std::pair{dt, dp};
  };
  auto [dt, dp] = scan(0.0, kPi / 2, 0.0, 2 * kPi, 2000);
  for (int level = 0; level < 12; ++level) {
    const double wt = 2 * dt;
    const double wp = 2 * dp;
    std::tie(dt, dp) = scan(best.t - wt, best.t + wt, best.p - wp, best.p + wp, 40);
  }
  return best;
}

}  // namespace subspace_glr::testing
