#include "subspace_glr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "subspace_glr/errors.hpp"

namespace subspace_glr {

namespace {

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::invalid_argument, field + ": " + msg);
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

const char* to_string(SweepAxis::Kind kind) {
  switch (kind) {
    case SweepAxis::Kind::snr_s_db: return "snr_s_db";
    case SweepAxis::Kind::snapshots: return "n";
    case SweepAxis::Kind::antennas: return "l";
  }
  return "unknown";
}

SweepAxis::Kind sweep_kind_from_string(const std::string& name) {
  if (name == "snr_s_db") return SweepAxis::Kind::snr_s_db;
  if (name == "n") return SweepAxis::Kind::snapshots;
  if (name == "l") return SweepAxis::Kind::antennas;
  throw Error(ErrorKind::invalid_argument, "sweep.axis: expected 'snr_s_db', 'n' or 'l', got '" + name + "'");
}

void ExperimentConfig::validate() const {
  require(trials_h0 >= 1, "trials_h0", "must be >= 1");
  require(trials_h1 >= 1, "trials_h1", "must be >= 1");
  for (double p : pfa_grid) require(p > 0.0 && p < 1.0, "pfa_grid", "every entry must lie in (0, 1)");
  require(!detectors.empty(), "detectors", "at least one detector must be enabled");
  require(max_failure_rate >= 0.0 && max_failure_rate < 1.0, "max_failure_rate", "must lie in [0, 1)");
  optimizer.validate();
  require(null_dist.ks_t_max > null_dist.ks_t_min, "null_dist.ks_t_max", "must exceed ks_t_min");
  require(null_dist.table_step > 0.0, "null_dist.table_step", "must be > 0");
  require(null_dist.table_max >= 0.0, "null_dist.table_max", "must be >= 0");
  if (sweep) {
    require(!sweep->values.empty(), "sweep.values", "must not be empty");
    for (std::size_t i = 1; i < sweep->values.size(); ++i)
      require(sweep->values[i] > sweep->values[i - 1], "sweep.values", "must be strictly increasing");
    if (sweep->kind != SweepAxis::Kind::snr_s_db) {
      for (double v : sweep->values) require(is_integer(v) && v >= 1.0, "sweep.values", "must be positive integers");
      require(!sweep->snr_r_offset_db, "sweep.snr_r_offset_db", "only applies to an snr_s_db sweep");
    }
    for (std::size_t k = 0; k < sweep->values.size(); ++k) scenario_at(k).validate();
  } else {
    scenario.validate();
  }
}

ScenarioConfig ExperimentConfig::scenario_at(std::size_t point) const {
  ScenarioConfig sc = scenario;
  if (!sweep) return sc;
  const double v = sweep->values.at(point);
  switch (sweep->kind) {
    case SweepAxis::Kind::snr_s_db:
      sc.snr_s_db = v;
      if (sweep->snr_r_offset_db) sc.snr_r_db = v + *sweep->snr_r_offset_db;
      break;
    case SweepAxis::Kind::snapshots: sc.snapshots = static_cast<int>(v); break;
    case SweepAxis::Kind::antennas: sc.antennas = static_cast<int>(v); break;
  }
  return sc;
}

std::string TrialRecord::seed_tag() const {
  return "seed=" + std::to_string(seed) + "/trial=" + std::to_string(trial_index);
}

TrialRecord run_trial(const ScenarioConfig& scenario, SteeringMode mode, const DetectorSet& detectors,
                      const TrustRegionOptions& opts, std::uint64_t trial_index, Hypothesis hypothesis) {
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.hypothesis = hypothesis;
  rec.seed = scenario.seed;
  try {
    Rng steer_rng(scenario.seed, trial_index, DrawPurpose::steering);
    Rng gain_rng(scenario.seed, trial_index, DrawPurpose::gains);
    Rng noise_rng(scenario.seed, trial_index, DrawPurpose::noise_covariance);
    Rng snap_rng(scenario.seed, trial_index, DrawPurpose::snapshots);

    const SteeringPair steering = draw_steering(steer_rng, scenario.antennas, mode);
    const ChannelRealization chan = draw_channel(gain_rng, noise_rng, scenario);
    const SnapshotData data = synth_snapshots(scenario, steering, chan, hypothesis, snap_rng);
    DetectorReport rep = evaluate(data, steering, detectors, opts);
    if (rep.optim) {
      rec.iterations = rep.optim->iterations;
      rep.optim->j_trace.clear();
      rep.optim->j_trace.shrink_to_fit();
    }
    rec.report = std::move(rep);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, const ScenarioConfig& scenario,
                                    unsigned threads) {
  scenario.validate();
  cfg.optimizer.validate();
  const std::size_t total = cfg.trials_h0 + cfg.trials_h1;
  std::vector<TrialRecord> records(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const Hypothesis h = i < cfg.trials_h0 ? Hypothesis::h0 : Hypothesis::h1;
    records[i] = run_trial(scenario, cfg.steering_mode, cfg.detectors, cfg.optimizer, i, h);
  });
  return records;
}

std::size_t count_invalid(const std::vector<TrialRecord>& records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const TrialRecord& r) { return !r.valid(); }));
}

std::vector<double> collect_stats(const std::vector<TrialRecord>& records, Detector d, Hypothesis h) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (!r.valid() || r.hypothesis != h) continue;
    if (auto v = r.report->get(d)) out.push_back(*v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> collect_two_log_glr(const std::vector<TrialRecord>& records, Hypothesis h) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.valid() && r.hypothesis == h && r.report->two_log_glr) out.push_back(*r.report->two_log_glr);
  std::sort(out.begin(), out.end());
  return out;
}

double calibrate_threshold(std::span<const double> h0_sorted, double pfa) {
  if (h0_sorted.empty()) throw Error(ErrorKind::invalid_argument, "null sample is empty");
  if (!(pfa > 0.0 && pfa < 1.0)) throw Error(ErrorKind::invalid_argument, "pfa must lie in (0, 1)");
  const std::size_t m = h0_sorted.size();
  // rank = ceil((1 - pfa) M) = M - floor(pfa M); the slack absorbs
  // representation error in products such as 0.05 * 100.
  const auto above = static_cast<std::size_t>(std::floor(pfa * static_cast<double>(m) * (1.0 + 1e-12)));
  const std::size_t rank = std::max<std::size_t>(m - std::min(above, m), 1);
  return h0_sorted[rank - 1];
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == n ? 1.0 : std::min(1.0, centre + half)};
}

RocCurve roc_curve(std::span<const double> h0_sorted, std::span<const double> h1_sorted) {
  RocCurve roc;
  const double m0 = static_cast<double>(h0_sorted.size());
  const double m1 = static_cast<double>(h1_sorted.size());
  if (h0_sorted.empty() || h1_sorted.empty())
    throw Error(ErrorKind::invalid_argument, "ROC needs nonempty H0 and H1 samples");

  roc.points.push_back({0.0, 0.0});
  // Walk both sorted samples from the top; each pooled unique value is one
  // threshold of the rule "stat >= t".
  auto i0 = static_cast<std::ptrdiff_t>(h0_sorted.size()) - 1;
  auto i1 = static_cast<std::ptrdiff_t>(h1_sorted.size()) - 1;
  std::size_t above0 = 0;
  std::size_t above1 = 0;
  while (i0 >= 0 || i1 >= 0) {
    double t = -std::numeric_limits<double>::infinity();
    if (i0 >= 0) t = std::max(t, h0_sorted[i0]);
    if (i1 >= 0) t = std::max(t, h1_sorted[i1]);
    while (i0 >= 0 && h0_sorted[i0] >= t) { ++above0; --i0; }
    while (i1 >= 0 && h1_sorted[i1] >= t) { ++above1; --i1; }
    roc.points.push_back({above0 / m0, above1 / m1});
  }
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto& a = roc.points[k - 1];
    const auto& b = roc.points[k];
    roc.auc += 0.5 * (b.pfa - a.pfa) * (a.pd + b.pd);
  }
  return roc;
}

PmPoint pm_at(std::span<const double> h0_sorted, std::span<const double> h1_sorted, double pfa) {
  if (h1_sorted.empty()) throw Error(ErrorKind::invalid_argument, "H1 sample is empty");
  PmPoint pt;
  pt.pfa = pfa;
  pt.threshold = calibrate_threshold(h0_sorted, pfa);
  const auto misses = static_cast<std::size_t>(
      std::upper_bound(h1_sorted.begin(), h1_sorted.end(), pt.threshold) - h1_sorted.begin());
  pt.pm = static_cast<double>(misses) / static_cast<double>(h1_sorted.size());
  pt.ci = wilson_interval(misses, h1_sorted.size());
  return pt;
}

WilksDiag wilks_diag(std::vector<double> two_log_glr, double t_lo, double t_hi, double table_max,
                     double table_step) {
  if (two_log_glr.empty()) throw Error(ErrorKind::invalid_argument, "no statistics to compare");
  if (!(t_hi > t_lo)) throw Error(ErrorKind::invalid_argument, "KS range is empty");
  for (double& v : two_log_glr) {
    if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "2 log Lambda is not finite");
    if (v < -1e-9) throw Error(ErrorKind::invalid_argument, "2 log Lambda is negative");
    v = std::max(v, 0.0);
  }
  std::sort(two_log_glr.begin(), two_log_glr.end());
  const double m = static_cast<double>(two_log_glr.size());

  auto ecdf = [&](double t) {
    return static_cast<double>(std::upper_bound(two_log_glr.begin(), two_log_glr.end(), t) -
                               two_log_glr.begin()) / m;
  };

  WilksDiag out;
  double d = 0.0;
  for (std::size_t i = 0; i < two_log_glr.size(); ++i) {
    const double x = two_log_glr[i];
    if (x < t_lo || x > t_hi) continue;
    const double f = chi2_2_cdf(x);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / m - f), std::abs(static_cast<double>(i) / m - f)});
  }
  // Endpoints of the window; the left limit at t_lo is covered by the
  // sample points above when t_lo is a sample value.
  if (std::isfinite(t_lo)) d = std::max(d, std::abs(ecdf(t_lo) - chi2_2_cdf(t_lo)));
  if (std::isfinite(t_hi)) d = std::max(d, std::abs(ecdf(t_hi) - chi2_2_cdf(t_hi)));
  out.ks_distance = d;

  const auto rows = static_cast<std::size_t>(std::floor(table_max / table_step + 1e-9)) + 1;
  out.table.reserve(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    const double t = static_cast<double>(k) * table_step;
    out.table.push_back({t, ecdf(t), chi2_2_cdf(t)});
  }
  return out;
}

}  // namespace subspace_glr
