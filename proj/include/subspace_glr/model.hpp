#pragma once

#include <cstdint>
#include <string>

#include "subspace_glr/rng.hpp"
#include "subspace_glr/types.hpp"

namespace subspace_glr {

/// Known unit-norm bases of the surveillance and reference channel subspaces.
struct SteeringPair {
  CVector u_s;
  CVector u_r;

  /// Validates dimensions and unit norm (to `tol`); throws otherwise.
  static SteeringPair make(CVector u_s, CVector u_r, double tol = 1e-12);

  Eigen::Index antennas() const { return u_s.size(); }
};

enum class SteeringMode {
  ula_random_doa,  // ULA manifold, DOA uniform on (-pi/2, pi/2)
  random_unit,     // normalized CN(0, I)
};

const char* to_string(SteeringMode mode);
SteeringMode steering_mode_from_string(const std::string& name);

struct ScenarioConfig {
  int antennas = 4;        // L, per array
  int snapshots = 15;      // N
  double snr_s_db = 0.0;
  double snr_r_db = 0.0;
  double sigma_x2 = 1.0;   // signal variance; 0 disables the signal
  int wishart_dof = 0;     // 0 means 2L
  std::uint64_t seed = 1;

  int effective_dof() const { return wishart_dof > 0 ? wishart_dof : 2 * antennas; }
  /// Throws ErrorKind::invalid_argument with the offending field name.
  void validate() const;
};

/// One draw of the unknown channel: complex gains and noise covariances,
/// the latter already scaled to the configured SNRs.
struct ChannelRealization {
  cplx a_s;
  cplx a_r;
  CMatrix sigma_ss;
  CMatrix sigma_rr;
  double sigma_x2 = 1.0;

  double q_ss() const { return sigma_x2 * std::norm(a_s); }
  double q_rr() const { return sigma_x2 * std::norm(a_r); }
  cplx q_sr() const { return sigma_x2 * a_s * std::conj(a_r); }
  double phi() const;
};

struct SnapshotData {
  CMatrix y_s;  // L x N
  CMatrix y_r;  // L x N
  Hypothesis hypothesis = Hypothesis::h0;

  Eigen::Index antennas() const { return y_s.rows(); }
  Eigen::Index snapshots() const { return y_s.cols(); }
  /// Throws on mismatched shapes or empty data.
  void validate() const;
};

/// Half-wavelength ULA response exp(j*pi*l*sin(theta)) / sqrt(L).
CVector ula_steering(int antennas, double theta);

CVector random_unit_vector(Rng& rng, int antennas);

SteeringPair draw_steering(Rng& rng, int antennas, SteeringMode mode);

/// a ~ CN(0, 1)
cplx draw_channel_gain(Rng& rng);

/// Scaled complex Wishart G G^H / dof, G being L x dof with CN(0, 1) entries.
CMatrix draw_noise_cov(Rng& rng, int antennas, int dof);

/// Returns c * sigma with tr(c * sigma) = sigma_x2 |gain|^2 10^(-snr_db / 10),
/// so the input SNR sigma_x2 ||h||^2 / tr(Sigma) equals snr_db exactly.
CMatrix scale_noise_to_snr(const CMatrix& sigma, cplx gain, double sigma_x2, double snr_db);

/// Gains and SNR-scaled Wishart covariances, drawn from the `gains` and
/// `noise` streams respectively. With sigma_x2 == 0 the noise is scaled as if
/// sigma_x2 were 1 so the noise level does not depend on signal presence.
ChannelRealization draw_channel(Rng& gains, Rng& noise, const ScenarioConfig& cfg);

/// Draws N i.i.d. snapshots of the two-channel measurement model. Under H0
/// the surveillance array sees noise only; the reference array always sees
/// the signal.
SnapshotData synth_snapshots(const ScenarioConfig& cfg, const SteeringPair& steering,
                             const ChannelRealization& chan, Hypothesis hypothesis, Rng& rng);

/// Population covariance R0 or R1 (2L x 2L) of the model.
CMatrix population_covariance(const SteeringPair& steering, const ChannelRealization& chan,
                              Hypothesis hypothesis);

}  // namespace subspace_glr
