#include "subspace_glr/experiments.hpp"

#include <algorithm>
#include <cstdio>

#include "subspace_glr/errors.hpp"

namespace subspace_glr {

namespace {

constexpr std::size_t kMaxExamples = 10;

std::vector<TrialRecord> run_null_trials(const ExperimentConfig& cfg, const DetectorSet& which,
                                         unsigned threads) {
  cfg.scenario.validate();
  cfg.optimizer.validate();
  std::vector<TrialRecord> records(cfg.trials_h0);
  parallel_for(records.size(), threads, [&](std::size_t i) {
    records[i] = run_trial(cfg.scenario, cfg.steering_mode, which, cfg.optimizer, i, Hypothesis::h0);
  });
  return records;
}

}  // namespace

void FailureSummary::add(const std::vector<TrialRecord>& records) {
  trials += records.size();
  for (const auto& r : records) {
    if (r.valid()) continue;
    ++invalid;
    if (examples.size() < kMaxExamples) examples.push_back(r.seed_tag() + ": " + r.error);
  }
}

RocResult run_roc(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto records = run_trials(cfg, cfg.scenario, threads);
  RocResult out;
  out.failures.add(records);
  for (Detector d : kAllDetectors) {
    if (!cfg.detectors.contains(d)) continue;
    const auto h0 = collect_stats(records, d, Hypothesis::h0);
    const auto h1 = collect_stats(records, d, Hypothesis::h1);
    if (h0.empty() || h1.empty())
      throw Error(ErrorKind::non_finite, std::string("no valid trials for ") + to_string(d));
    DetectorRoc dr{d, roc_curve(h0, h1), {}};
    for (double pfa : cfg.pfa_grid) {
      const PmPoint p = pm_at(h0, h1, pfa);
      const auto false_alarms = static_cast<double>(h0.end() - std::upper_bound(h0.begin(), h0.end(), p.threshold));
      dr.calibrated.push_back({pfa, p.threshold, false_alarms / static_cast<double>(h0.size()), 1.0 - p.pm});
    }
    out.detectors.push_back(std::move(dr));
  }
  return out;
}

PmSweepResult run_pm_sweep(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  PmSweepResult out;
  for (std::size_t k = 0; k < cfg.sweep_points(); ++k) {
    const ScenarioConfig sc = cfg.scenario_at(k);
    const double value = cfg.sweep ? cfg.sweep->values[k] : cfg.scenario.snr_s_db;
    const auto records = run_trials(cfg, sc, threads);
    out.failures.add(records);
    for (Detector d : kAllDetectors) {
      if (!cfg.detectors.contains(d)) continue;
      const auto h0 = collect_stats(records, d, Hypothesis::h0);
      const auto h1 = collect_stats(records, d, Hypothesis::h1);
      if (h0.empty() || h1.empty())
        throw Error(ErrorKind::non_finite, std::string("no valid trials for ") + to_string(d));
      for (double pfa : cfg.pfa_grid) {
        PmPoint p = pm_at(h0, h1, pfa);
        p.sweep_value = value;
        out.rows.push_back({d, p});
      }
    }
  }
  return out;
}

NullDistResult run_null_dist(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  DetectorSet glr_only;
  glr_only.insert(Detector::glr);
  const auto records = run_null_trials(cfg, glr_only, threads);
  NullDistResult out;
  out.failures.add(records);
  auto stats = collect_two_log_glr(records, Hypothesis::h0);
  if (stats.empty()) throw Error(ErrorKind::non_finite, "no valid null trials");
  out.samples = stats.size();
  const NullDistOptions& o = cfg.null_dist;
  out.diag = wilks_diag(std::move(stats), o.ks_t_min, o.ks_t_max, o.table_max, o.table_step);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string roc_csv(const RocResult& r) {
  std::string s = "detector,pfa,pd\n";
  for (const auto& d : r.detectors)
    for (const auto& p : d.curve.points)
      s += std::string(to_string(d.detector)) + "," + format_double(p.pfa) + "," + format_double(p.pd) + "\n";
  return s;
}

std::string auc_csv(const RocResult& r) {
  std::string s = "detector,auc\n";
  for (const auto& d : r.detectors) s += std::string(to_string(d.detector)) + "," + format_double(d.curve.auc) + "\n";
  return s;
}

std::string roc_calibrated_csv(const RocResult& r) {
  std::string s = "detector,pfa_target,threshold,pfa,pd\n";
  for (const auto& d : r.detectors)
    for (const auto& c : d.calibrated)
      s += std::string(to_string(d.detector)) + "," + format_double(c.pfa_target) + "," + format_double(c.threshold) +
           "," + format_double(c.pfa) + "," + format_double(c.pd) + "\n";
  return s;
}

std::string pm_csv(const PmSweepResult& r) {
  std::string s = "detector,sweep_value,pfa,pm,ci_lo,ci_hi\n";
  for (const auto& row : r.rows) {
    const PmPoint& p = row.point;
    s += std::string(to_string(row.detector)) + "," + format_double(p.sweep_value) + "," + format_double(p.pfa) + "," +
         format_double(p.pm) + "," + format_double(p.ci.lo) + "," + format_double(p.ci.hi) + "\n";
  }
  return s;
}

std::string nulldist_csv(const NullDistResult& r) {
  std::string s = "t,empirical_cdf,chi2_cdf\n";
  for (const auto& row : r.diag.table)
    s += format_double(row.t) + "," + format_double(row.empirical) + "," + format_double(row.chi2) + "\n";
  return s;
}

}  // namespace subspace_glr
