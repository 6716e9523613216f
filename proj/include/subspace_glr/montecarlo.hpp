#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subspace_glr/detectors.hpp"
#include "subspace_glr/model.hpp"

namespace subspace_glr {

struct SweepAxis {
  enum class Kind { snr_s_db, snapshots, antennas };

  Kind kind = Kind::snr_s_db;
  std::vector<double> values;
  /// When sweeping snr_s_db: snr_r = snr_s + offset. Unset keeps snr_r fixed.
  std::optional<double> snr_r_offset_db;
};

const char* to_string(SweepAxis::Kind kind);
SweepAxis::Kind sweep_kind_from_string(const std::string& name);

/// Window and plotting grid for the null-distribution diagnostic.
struct NullDistOptions {
  double ks_t_min = 0.0;
  double ks_t_max = std::numeric_limits<double>::infinity();
  double table_max = 12.0;
  double table_step = 0.1;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::size_t trials_h0 = 10000;
  std::size_t trials_h1 = 10000;
  std::vector<double> pfa_grid = {1e-3, 1e-2, 1e-1};
  std::optional<SweepAxis> sweep;
  SteeringMode steering_mode = SteeringMode::ula_random_doa;
  DetectorSet detectors = DetectorSet::all();
  TrustRegionOptions optimizer;
  /// Runs whose invalid-trial fraction exceeds this are failed.
  double max_failure_rate = 1e-3;
  NullDistOptions null_dist;

  /// Throws ErrorKind::invalid_argument naming the offending field.
  void validate() const;

  std::size_t sweep_points() const { return sweep ? sweep->values.size() : 1; }
  /// Scenario for one sweep point. All points share the seed, so the same
  /// trial index reuses the same underlying Gaussian draws across points.
  ScenarioConfig scenario_at(std::size_t point) const;
};

struct TrialRecord {
  std::uint64_t trial_index = 0;
  Hypothesis hypothesis = Hypothesis::h0;
  std::optional<DetectorReport> report;
  int iterations = 0;
  std::uint64_t seed = 0;  // experiment seed the substreams derive from
  std::string error;       // nonempty for invalid trials

  bool valid() const { return report.has_value(); }
  /// "seed=<seed>/trial=<index>"
  std::string seed_tag() const;
};

/// Runs one trial end to end. Never throws for numerical failures; they are
/// recorded in `error`.
TrialRecord run_trial(const ScenarioConfig& scenario, SteeringMode mode, const DetectorSet& detectors,
                      const TrustRegionOptions& opts, std::uint64_t trial_index, Hypothesis hypothesis);

/// Trials [0, trials_h0) are H0 and [trials_h0, trials_h0 + trials_h1) are H1.
/// Output is ordered by trial index and independent of `threads` (0 = auto).
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, const ScenarioConfig& scenario,
                                    unsigned threads = 0);

/// Calls fn(i) for i in [0, count) on a pool of worker threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

std::size_t count_invalid(const std::vector<TrialRecord>& records);

/// Valid statistics of one detector under one hypothesis, sorted ascending.
std::vector<double> collect_stats(const std::vector<TrialRecord>& records, Detector d, Hypothesis h);
/// Same for 2 log Lambda.
std::vector<double> collect_two_log_glr(const std::vector<TrialRecord>& records, Hypothesis h);

/// Empirical (1 - pfa)-quantile of the sorted null sample: the order
/// statistic of rank ceil((1 - pfa) M). The rule "stat > threshold" then has
/// an empirical false-alarm rate <= pfa on the sample.
double calibrate_threshold(std::span<const double> h0_sorted, double pfa);

struct BinomialInterval {
  double lo;
  double hi;
};

/// Wilson score interval.
BinomialInterval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

struct RocPoint {
  double pfa;
  double pd;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0, 0) to (1, 1), both coordinates non-decreasing
  double auc = 0.0;
};

/// Sweeps the rule "stat >= t" over every pooled unique value.
RocCurve roc_curve(std::span<const double> h0_sorted, std::span<const double> h1_sorted);

struct PmPoint {
  double sweep_value = 0.0;
  double pfa = 0.0;
  double threshold = 0.0;
  double pm = 0.0;
  BinomialInterval ci{0.0, 0.0};
};

/// Miss probability at the threshold calibrated for `pfa` on the null sample.
PmPoint pm_at(std::span<const double> h0_sorted, std::span<const double> h1_sorted, double pfa);

struct CdfRow {
  double t;
  double empirical;
  double chi2;
};

struct WilksDiag {
  double ks_distance = 0.0;
  std::vector<CdfRow> table;
};

/// CDF of the chi-squared law with two degrees of freedom.
inline double chi2_2_cdf(double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t / 2.0); }

/// Kolmogorov distance between the empirical CDF of 2 log Lambda and
/// 1 - exp(-t/2), taken over t in [t_lo, t_hi], plus a CDF table on
/// [0, table_max] with step table_step. Values down to -1e-9 are clamped to
/// zero; anything lower is rejected.
WilksDiag wilks_diag(std::vector<double> two_log_glr, double t_lo = 0.0,
                     double t_hi = std::numeric_limits<double>::infinity(), double table_max = 12.0,
                     double table_step = 0.1);

}  // namespace subspace_glr
