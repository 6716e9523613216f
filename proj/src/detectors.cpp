#include "subspace_glr/detectors.hpp"

#include <cmath>

#include "subspace_glr/errors.hpp"
#include "subspace_glr/linalg.hpp"

namespace subspace_glr {

namespace {

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, std::string(what) + " is not finite");
  return v;
}

void require_steering(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  if (u_s.size() != s.antennas() || u_r.size() != s.antennas())
    throw Error(ErrorKind::invalid_dimension, "steering vector length differs from L");
}

double lambda_low_from(const SampleForms& f) {
  return std::norm(f.eta_sr) / (f.us_inv_us * f.ur_inv_ur);
}

double lambda_app_from(const SampleForms& f) {
  const double schur = f.ur_inv_ur - f.alpha_sr;
  if (!(schur > 0.0))
    throw Error(ErrorKind::degenerate_sample,
                "u_r^H S_rr^{-1} u_r - alpha_sr is not positive; N is too small for this L");
  return std::norm(f.eta_sr) / (f.us_inv_us * schur);
}

RVector singular_values(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

CVector dominant_right_singular_vector(const CMatrix& y, const char* name) {
  Eigen::JacobiSVD<CMatrix> svd(y, Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || !(svd.singularValues()(0) > 0.0))
    throw Error(ErrorKind::invalid_argument, std::string(name) + " is zero; no dominant singular vector");
  return svd.matrixV().col(0);
}

}  // namespace

const char* to_string(Detector d) {
  switch (d) {
    case Detector::glr: return "glr";
    case Detector::lambda_app: return "lambda_app";
    case Detector::lambda_low: return "lambda_low";
    case Detector::sigma_max: return "sigma_max";
    case Detector::t_cc: return "t_cc";
    case Detector::t_svd: return "t_svd";
  }
  return "unknown";
}

Detector detector_from_string(std::string_view name) {
  for (Detector d : kAllDetectors)
    if (name == to_string(d)) return d;
  throw Error(ErrorKind::invalid_argument, "unknown detector '" + std::string(name) + "'");
}

DetectorSet DetectorSet::all() {
  DetectorSet set;
  for (Detector d : kAllDetectors) set.insert(d);
  return set;
}

NuSquared nu_squared(const CVector& x, const CostContext& ctx) {
  NuSquared nu;
  nu.e_form = std::norm(x[0]);
  nu.xi_form = linalg::quadratic(ctx.xi(), x);
  nu.psi_form = linalg::quadratic(ctx.psi(), x);
  nu.gamma_form = linalg::quadratic(ctx.gamma(), x);
  nu.value = (nu.e_form / nu.xi_form) * (nu.psi_form / nu.gamma_form);
  return nu;
}

GlrResult glr_exact(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r,
                    const TrustRegionOptions& opts) {
  require_steering(s, u_s, u_r);
  return glr_exact(s, u_s, unitary_basis(u_r), opts);
}

GlrResult glr_exact(const BlockSampleCov& s, const CVector& u_s, const CMatrix& u_r_full,
                    const TrustRegionOptions& opts) {
  const ChannelFactors factors(s);
  const CVector u_r = u_r_full.col(0);
  require_steering(s, u_s, u_r);
  const CostContext ctx(build_reduced_forms(s, u_s, u_r_full));
  const CVector x0 = init_x(s.s_rr(), u_r_full);

  GlrResult out;
  out.optim = maximize_j(ctx, x0, opts);
  const SampleForms forms = sample_forms(factors, u_s, u_r);
  const NuSquared nu = nu_squared(out.optim.x_hat, ctx);
  out.glr_1n = finite_or_throw(nu.value / (forms.us_inv_us * forms.ur_inv_ur), "Lambda^{1/N}");
  return out;
}

double glr_sample(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  require_steering(s, u_s, u_r);
  return finite_or_throw(lambda_app_from(sample_forms(ChannelFactors(s), u_s, u_r)), "lambda_app");
}

double glr_low(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  require_steering(s, u_s, u_r);
  return finite_or_throw(lambda_low_from(sample_forms(ChannelFactors(s), u_s, u_r)), "lambda_low");
}

double sigma_max_coherence(const BlockSampleCov& s) {
  return finite_or_throw(singular_values(coherence_matrix(s))(0), "sigma_max");
}

double cross_corr_stat(const BlockSampleCov& s) { return s.s_sr().squaredNorm(); }

double svd_corr_stat(const SnapshotData& data) {
  data.validate();
  const CVector v_s = dominant_right_singular_vector(data.y_s, "Y_s");
  const CVector v_r = dominant_right_singular_vector(data.y_r, "Y_r");
  return std::norm(v_s.dot(v_r));
}

cplx ml_qsr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr) {
  require_steering(s, u_s, u_r);
  const linalg::Cholesky ss(s.s_ss(), "S_ss");
  const cplx eta = eta_sr(s, u_s, u_r, r_rr);
  const double denom =
      std::norm(eta) + ss.inverse_quadratic(u_s) * (eta_rr(s, u_r, r_rr) - alpha_sr(s, u_s, u_r, r_rr));
  if (!(std::abs(denom) > 0.0) || !std::isfinite(denom))
    throw Error(ErrorKind::degenerate_sample, "q_sr estimate has a zero denominator");
  return eta / denom;
}

cplx low_snr_qsr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r) {
  require_steering(s, u_s, u_r);
  const SampleForms f = sample_forms(ChannelFactors(s), u_s, u_r);
  return f.eta_sr / (f.us_inv_us * f.ur_inv_ur);
}

CMatrix m_matrix(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr,
                 cplx q_sr) {
  require_steering(s, u_s, u_r);
  const linalg::Cholesky rr(r_rr, "R_rr");
  const CVector r = rr.solve(u_r);
  const CVector sr_r = s.s_sr() * r;
  const double e_rr = linalg::quadratic(s.s_rr(), r);
  CMatrix m = s.s_ss() + std::norm(q_sr) * e_rr * u_s * u_s.adjoint();
  m -= q_sr * u_s * sr_r.adjoint();
  m -= std::conj(q_sr) * sr_r * u_s.adjoint();
  return m;
}

std::optional<double> DetectorReport::get(Detector d) const {
  switch (d) {
    case Detector::glr: return glr_1n;
    case Detector::lambda_app: return lambda_app;
    case Detector::lambda_low: return lambda_low;
    case Detector::sigma_max: return sigma_max;
    case Detector::t_cc: return t_cc;
    case Detector::t_svd: return t_svd;
  }
  return std::nullopt;
}

DetectorReport evaluate(const SnapshotData& data, const SteeringPair& steering, const DetectorSet& which,
                        const TrustRegionOptions& opts) {
  data.validate();
  if (steering.u_s.size() != data.antennas() || steering.u_r.size() != data.antennas())
    throw Error(ErrorKind::invalid_dimension, "steering vectors and data disagree on L");
  const BlockSampleCov s = sample_cov(data);
  if (s.rank_warning())
    throw Error(ErrorKind::degenerate_sample, "N = " + std::to_string(s.snapshots()) + " < 2L = " +
                                                  std::to_string(2 * s.antennas()));

  DetectorReport rep;
  if (which.contains(Detector::lambda_app) || which.contains(Detector::lambda_low)) {
    const SampleForms f = sample_forms(ChannelFactors(s), steering.u_s, steering.u_r);
    if (which.contains(Detector::lambda_app))
      rep.lambda_app = finite_or_throw(lambda_app_from(f), "lambda_app");
    if (which.contains(Detector::lambda_low))
      rep.lambda_low = finite_or_throw(lambda_low_from(f), "lambda_low");
  }
  if (which.contains(Detector::glr)) {
    GlrResult g = glr_exact(s, steering.u_s, steering.u_r, opts);
    rep.glr_1n = g.glr_1n;
    rep.two_log_glr = finite_or_throw(2.0 * static_cast<double>(s.snapshots()) * std::log(g.glr_1n),
                                      "2 log Lambda");
    rep.optim = std::move(g.optim);
  }
  if (which.contains(Detector::sigma_max)) rep.sigma_max = sigma_max_coherence(s);
  if (which.contains(Detector::t_cc)) rep.t_cc = finite_or_throw(cross_corr_stat(s), "t_cc");
  if (which.contains(Detector::t_svd)) rep.t_svd = finite_or_throw(svd_corr_stat(data), "t_svd");
  return rep;
}

}  // namespace subspace_glr
