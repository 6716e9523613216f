#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "subspace_glr/montecarlo.hpp"

namespace subspace_glr {

struct FailureSummary {
  std::size_t trials = 0;
  std::size_t invalid = 0;
  std::vector<std::string> examples;  // "seed=../trial=..: message", at most 10

  double rate() const { return trials ? static_cast<double>(invalid) / static_cast<double>(trials) : 0.0; }
  void add(const std::vector<TrialRecord>& records);
};

/// Operating point of the rule "stat > threshold" with the threshold
/// calibrated on the null sample for pfa_target.
struct CalibratedPoint {
  double pfa_target;
  double threshold;
  double pfa;
  double pd;
};

struct DetectorRoc {
  Detector detector;
  RocCurve curve;
  std::vector<CalibratedPoint> calibrated;  // one per pfa_grid entry
};

struct RocResult {
  std::vector<DetectorRoc> detectors;
  FailureSummary failures;
};

/// ROC of every enabled detector at cfg.scenario (the sweep is ignored).
RocResult run_roc(const ExperimentConfig& cfg, unsigned threads = 0);

struct PmRow {
  Detector detector;
  PmPoint point;
};

struct PmSweepResult {
  std::vector<PmRow> rows;  // sweep point major, then detector, then pfa
  FailureSummary failures;
};

/// Miss probability at every sweep point and every pfa in cfg.pfa_grid.
PmSweepResult run_pm_sweep(const ExperimentConfig& cfg, unsigned threads = 0);

struct NullDistResult {
  WilksDiag diag;
  std::size_t samples = 0;
  FailureSummary failures;
};

/// 2 log Lambda over cfg.trials_h0 null trials at cfg.scenario against the
/// chi-squared law with two degrees of freedom.
NullDistResult run_null_dist(const ExperimentConfig& cfg, unsigned threads = 0);

/// Round-trip decimal ("%.17g").
std::string format_double(double v);

/// detector,pfa,pd
std::string roc_csv(const RocResult& r);
/// detector,auc
std::string auc_csv(const RocResult& r);
/// detector,pfa_target,threshold,pfa,pd
std::string roc_calibrated_csv(const RocResult& r);
/// detector,sweep_value,pfa,pm,ci_lo,ci_hi
std::string pm_csv(const PmSweepResult& r);
/// t,empirical_cdf,chi2_cdf
std::string nulldist_csv(const NullDistResult& r);

}  // namespace subspace_glr
