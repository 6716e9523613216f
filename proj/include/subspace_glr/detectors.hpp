#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "subspace_glr/covariance.hpp"
#include "subspace_glr/glr_optimizer.hpp"
#include "subspace_glr/model.hpp"

namespace subspace_glr {

enum class Detector { glr, lambda_app, lambda_low, sigma_max, t_cc, t_svd };

inline constexpr std::array<Detector, 6> kAllDetectors = {
    Detector::glr,       Detector::lambda_app, Detector::lambda_low,
    Detector::sigma_max, Detector::t_cc,       Detector::t_svd};

const char* to_string(Detector d);
Detector detector_from_string(std::string_view name);

/// Bitset over Detector.
class DetectorSet {
 public:
  static DetectorSet all();
  void insert(Detector d) { bits_ |= mask(d); }
  bool contains(Detector d) const { return (bits_ & mask(d)) != 0; }
  bool empty() const { return bits_ == 0; }

 private:
  static unsigned mask(Detector d) { return 1u << static_cast<unsigned>(d); }
  unsigned bits_ = 0;
};

/// |nu|^2 = (x^H E x / x^H Xi x) (x^H Psi x / x^H Gamma x) at the maximizer.
struct NuSquared {
  double value;
  double e_form;
  double xi_form;
  double psi_form;
  double gamma_form;
};

NuSquared nu_squared(const CVector& x, const CostContext& ctx);

struct GlrResult {
  double glr_1n;  // Lambda^{1/N}
  OptimResult optim;
};

/// Exact GLR: reduced forms, initialization at R_rr = S_rr, trust-region
/// maximization of J, then Lambda^{1/N} = |nu|^2 / ((u_s^H S_ss^{-1} u_s)
/// (u_r^H S_rr^{-1} u_r)). For L = 1 the cost is constant and the result
/// collapses to 1 + lambda_app.
GlrResult glr_exact(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r,
                    const TrustRegionOptions& opts = {});
/// Same, with a caller-chosen unitary completion U_r = [u_r V_r].
GlrResult glr_exact(const BlockSampleCov& s, const CVector& u_s, const CMatrix& u_r_full,
                    const TrustRegionOptions& opts = {});

/// lambda_app = |eta_sr|^2 / (u_s^H S_ss^{-1} u_s (u_r^H S_rr^{-1} u_r - alpha_sr)),
/// everything evaluated at R_rr = S_rr.
double glr_sample(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r);

/// lambda_low = |eta_sr|^2 / ((u_s^H S_ss^{-1} u_s)(u_r^H S_rr^{-1} u_r)).
double glr_low(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r);

/// Largest singular value of the coherence matrix.
double sigma_max_coherence(const BlockSampleCov& s);

/// ||S_sr||_F^2
double cross_corr_stat(const BlockSampleCov& s);

/// |v_s^H v_r|^2 for the dominant right singular vectors of Y_s and Y_r.
double svd_corr_stat(const SnapshotData& data);

/// ML estimate of q_sr for a given R_rr:
///   eta_sr / (|eta_sr|^2 + (u_s^H S_ss^{-1} u_s)(eta_rr - alpha_sr)).
cplx ml_qsr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr);

/// Low-SNR estimate eta_sr(S_rr) / ((u_s^H S_ss^{-1} u_s)(u_r^H S_rr^{-1} u_r)).
cplx low_snr_qsr(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r);

/// M(q_sr, R_rr), the effective sample covariance seen by Theta.
CMatrix m_matrix(const BlockSampleCov& s, const CVector& u_s, const CVector& u_r, const CMatrix& r_rr,
                 cplx q_sr);

struct DetectorReport {
  std::optional<double> glr_1n;
  std::optional<double> two_log_glr;  // 2 N log(glr_1n)
  std::optional<double> lambda_app;
  std::optional<double> lambda_low;
  std::optional<double> sigma_max;
  std::optional<double> t_cc;
  std::optional<double> t_svd;
  std::optional<OptimResult> optim;

  std::optional<double> get(Detector d) const;
};

/// Evaluates the enabled detectors on one record. Rejects N < 2L and
/// aborts with ErrorKind::non_finite if any statistic is not finite.
DetectorReport evaluate(const SnapshotData& data, const SteeringPair& steering,
                        const DetectorSet& which = DetectorSet::all(),
                        const TrustRegionOptions& opts = {});

}  // namespace subspace_glr
