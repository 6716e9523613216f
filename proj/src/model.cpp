#include "subspace_glr/model.hpp"

#include <cmath>
#include <numbers>

#include "subspace_glr/errors.hpp"
#include "subspace_glr/linalg.hpp"

namespace subspace_glr {

namespace {

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::invalid_argument, field + ": " + msg);
}

}  // namespace

SteeringPair SteeringPair::make(CVector u_s, CVector u_r, double tol) {
  if (u_s.size() == 0 || u_s.size() != u_r.size())
    throw Error(ErrorKind::invalid_dimension, "steering vectors must be nonempty and of equal length");
  if (std::abs(u_s.norm() - 1.0) > tol)
    throw Error(ErrorKind::invalid_argument, "u_s: norm " + std::to_string(u_s.norm()) + " is not 1");
  if (std::abs(u_r.norm() - 1.0) > tol)
    throw Error(ErrorKind::invalid_argument, "u_r: norm " + std::to_string(u_r.norm()) + " is not 1");
  return SteeringPair{std::move(u_s), std::move(u_r)};
}

const char* to_string(SteeringMode mode) {
  return mode == SteeringMode::ula_random_doa ? "ula-random-doa" : "random-unit";
}

SteeringMode steering_mode_from_string(const std::string& name) {
  if (name == "ula-random-doa") return SteeringMode::ula_random_doa;
  if (name == "random-unit") return SteeringMode::random_unit;
  throw Error(ErrorKind::invalid_argument,
              "steering_mode: expected 'ula-random-doa' or 'random-unit', got '" + name + "'");
}

void ScenarioConfig::validate() const {
  require(antennas >= 1, "L", "must be >= 1");
  require(snapshots >= 2 * antennas, "N", "must be >= 2L so the channel blocks are invertible");
  require(effective_dof() >= antennas, "wishart_dof", "must be >= L");
  require(std::isfinite(sigma_x2) && sigma_x2 >= 0.0, "sigma_x2", "must be finite and >= 0");
  require(std::isfinite(snr_s_db), "snr_s_db", "must be finite");
  require(std::isfinite(snr_r_db), "snr_r_db", "must be finite");
}

double ChannelRealization::phi() const {
  double p = std::arg(q_sr());
  if (p < 0.0) p += 2.0 * std::numbers::pi;
  return p;
}

void SnapshotData::validate() const {
  if (y_s.rows() == 0 || y_s.cols() == 0)
    throw Error(ErrorKind::invalid_dimension, "snapshot data is empty");
  if (y_s.rows() != y_r.rows() || y_s.cols() != y_r.cols())
    throw Error(ErrorKind::invalid_dimension, "Y_s and Y_r must have identical shapes");
}

CVector ula_steering(int antennas, double theta) {
  if (antennas < 1) throw Error(ErrorKind::invalid_dimension, "ULA needs at least one element");
  const double step = std::numbers::pi * std::sin(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  CVector u(antennas);
  for (int l = 0; l < antennas; ++l) u[l] = std::polar(scale, step * l);
  return u;
}

CVector random_unit_vector(Rng& rng, int antennas) {
  if (antennas < 1) throw Error(ErrorKind::invalid_dimension, "vector length must be >= 1");
  CVector v = rng.complex_normal_vector(antennas);
  return v / v.norm();
}

SteeringPair draw_steering(Rng& rng, int antennas, SteeringMode mode) {
  if (mode == SteeringMode::ula_random_doa) {
    const double half = std::numbers::pi / 2.0;
    const double theta_s = rng.uniform(-half, half);
    const double theta_r = rng.uniform(-half, half);
    return {ula_steering(antennas, theta_s), ula_steering(antennas, theta_r)};
  }
  CVector u_s = random_unit_vector(rng, antennas);
  CVector u_r = random_unit_vector(rng, antennas);
  return {std::move(u_s), std::move(u_r)};
}

cplx draw_channel_gain(Rng& rng) { return rng.complex_normal(); }

CMatrix draw_noise_cov(Rng& rng, int antennas, int dof) {
  if (antennas < 1) throw Error(ErrorKind::invalid_dimension, "L must be >= 1");
  if (dof < antennas)
    throw Error(ErrorKind::rank_deficient, "Wishart degrees of freedom " + std::to_string(dof) +
                                               " < L = " + std::to_string(antennas));
  const CMatrix g = rng.complex_normal_matrix(antennas, dof);
  return linalg::hermitian_part(g * g.adjoint() / static_cast<double>(dof));
}

CMatrix scale_noise_to_snr(const CMatrix& sigma, cplx gain, double sigma_x2, double snr_db) {
  const double g2 = std::norm(gain);
  if (!(g2 > 0.0)) throw Error(ErrorKind::degenerate_channel, "channel gain is zero");
  if (!(sigma_x2 > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma_x2: must be > 0");
  const double trace = sigma.trace().real();
  if (!(trace > 0.0)) throw Error(ErrorKind::not_positive_definite, "noise covariance has zero trace");
  const double target = sigma_x2 * g2 * std::pow(10.0, -snr_db / 10.0);
  return sigma * (target / trace);
}

ChannelRealization draw_channel(Rng& gains, Rng& noise, const ScenarioConfig& cfg) {
  ChannelRealization chan;
  chan.sigma_x2 = cfg.sigma_x2;
  chan.a_s = draw_channel_gain(gains);
  chan.a_r = draw_channel_gain(gains);
  const int dof = cfg.effective_dof();
  const CMatrix w_ss = draw_noise_cov(noise, cfg.antennas, dof);
  const CMatrix w_rr = draw_noise_cov(noise, cfg.antennas, dof);
  const double reference_power = cfg.sigma_x2 > 0.0 ? cfg.sigma_x2 : 1.0;
  chan.sigma_ss = scale_noise_to_snr(w_ss, chan.a_s, reference_power, cfg.snr_s_db);
  chan.sigma_rr = scale_noise_to_snr(w_rr, chan.a_r, reference_power, cfg.snr_r_db);
  return chan;
}

SnapshotData synth_snapshots(const ScenarioConfig& cfg, const SteeringPair& steering,
                             const ChannelRealization& chan, Hypothesis hypothesis, Rng& rng) {
  const Eigen::Index l = steering.antennas();
  const Eigen::Index n = cfg.snapshots;
  if (steering.u_r.size() != l || chan.sigma_ss.rows() != l || chan.sigma_ss.cols() != l ||
      chan.sigma_rr.rows() != l || chan.sigma_rr.cols() != l)
    throw Error(ErrorKind::invalid_dimension, "steering and noise covariance dimensions disagree");
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "N must be >= 1");

  const linalg::Cholesky root_ss(chan.sigma_ss, "Sigma_ss");
  const linalg::Cholesky root_rr(chan.sigma_rr, "Sigma_rr");

  // Draw order: signal, surveillance noise, reference noise.
  const CVector x = std::sqrt(chan.sigma_x2) * rng.complex_normal_vector(n);
  const CMatrix g_s = rng.complex_normal_matrix(l, n);
  const CMatrix g_r = rng.complex_normal_matrix(l, n);

  SnapshotData data;
  data.hypothesis = hypothesis;
  data.y_s = root_ss.factor() * g_s;
  data.y_r = root_rr.factor() * g_r;
  const CVector h_r = chan.a_r * steering.u_r;
  data.y_r += h_r * x.transpose();
  if (hypothesis == Hypothesis::h1) {
    const CVector h_s = chan.a_s * steering.u_s;
    data.y_s += h_s * x.transpose();
  }
  return data;
}

CMatrix population_covariance(const SteeringPair& steering, const ChannelRealization& chan,
                              Hypothesis hypothesis) {
  const Eigen::Index l = steering.antennas();
  CMatrix r = CMatrix::Zero(2 * l, 2 * l);
  const CVector& u_s = steering.u_s;
  const CVector& u_r = steering.u_r;
  r.topLeftCorner(l, l) = chan.sigma_ss;
  r.bottomRightCorner(l, l) = chan.q_rr() * u_r * u_r.adjoint() + chan.sigma_rr;
  if (hypothesis == Hypothesis::h1) {
    r.topLeftCorner(l, l) += chan.q_ss() * u_s * u_s.adjoint();
    r.topRightCorner(l, l) = chan.q_sr() * u_s * u_r.adjoint();
    r.bottomLeftCorner(l, l) = std::conj(chan.q_sr()) * u_r * u_s.adjoint();
  }
  return linalg::hermitian_part(r);
}

}  // namespace subspace_glr
