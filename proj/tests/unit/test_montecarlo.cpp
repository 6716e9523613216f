#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subspace_glr/errors.hpp"
#include "subspace_glr/montecarlo.hpp"

using namespace subspace_glr;

namespace {

ExperimentConfig small_config(std::size_t trials) {
  ExperimentConfig cfg;
  cfg.scenario.antennas = 3;
  cfg.scenario.snapshots = 12;
  cfg.scenario.snr_s_db = 0.0;
  cfg.scenario.snr_r_db = 10.0;
  cfg.scenario.seed = 77;
  cfg.trials_h0 = trials;
  cfg.trials_h1 = trials;
  return cfg;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, k = 0;
  double d = 0.0;
  while (i < a.size() && k < b.size()) {
    const double t = std::min(a[i], b[k]);
    while (i < a.size() && a[i] <= t) ++i;
    while (k < b.size() && b[k] <= t) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(k) / b.size()));
  }
  return d;
}

bool same_report(const DetectorReport& a, const DetectorReport& b) {
  for (Detector d : kAllDetectors)
    if (a.get(d) != b.get(d)) return false;
  return a.two_log_glr == b.two_log_glr && a.optim->x_hat == b.optim->x_hat;
}

}  // namespace

TEST_CASE("trials are reproducible") {
  const ExperimentConfig cfg = small_config(1);
  const TrialRecord a = run_trial(cfg.scenario, cfg.steering_mode, cfg.detectors, cfg.optimizer, 0, Hypothesis::h0);
  const TrialRecord b = run_trial(cfg.scenario, cfg.steering_mode, cfg.detectors, cfg.optimizer, 0, Hypothesis::h0);
  REQUIRE(a.valid());
  CHECK(same_report(*a.report, *b.report));
  CHECK(a.seed_tag() == "seed=77/trial=0");

  const auto first = run_trials(cfg, cfg.scenario, 1);
  const auto again = run_trials(cfg, cfg.scenario, 1);
  REQUIRE(first.size() == 2);
  CHECK(first[0].hypothesis == Hypothesis::h0);
  CHECK(first[1].hypothesis == Hypothesis::h1);
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(same_report(*first[i].report, *again[i].report));
}

TEST_CASE("thread count does not change records") {
  const ExperimentConfig cfg = small_config(40);
  const auto one = run_trials(cfg, cfg.scenario, 1);
  const auto many = run_trials(cfg, cfg.scenario, 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].trial_index == i);
    CHECK(same_report(*one[i].report, *many[i].report));
    CHECK(one[i].iterations == many[i].iterations);
  }
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("failed trials are recorded, not dropped") {
  ExperimentConfig cfg = small_config(3);
  cfg.scenario.snr_s_db = std::numeric_limits<double>::infinity();
  const TrialRecord r = run_trial(cfg.scenario, cfg.steering_mode, cfg.detectors, cfg.optimizer, 0, Hypothesis::h1);
  CHECK_FALSE(r.valid());
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("no signal makes H1 look like H0") {
  ExperimentConfig cfg = small_config(2000);
  cfg.scenario.sigma_x2 = 0.0;
  DetectorSet low;
  low.insert(Detector::lambda_low);
  cfg.detectors = low;
  const auto recs = run_trials(cfg, cfg.scenario, 0);
  CHECK(count_invalid(recs) == 0);
  const auto h0 = collect_stats(recs, Detector::lambda_low, Hypothesis::h0);
  const auto h1 = collect_stats(recs, Detector::lambda_low, Hypothesis::h1);
  // Two-sample KS critical value at level 0.01.
  const double crit = 1.628 * std::sqrt((h0.size() + h1.size()) / static_cast<double>(h0.size() * h1.size()));
  CHECK(ks_two_sample(h0, h1) < crit);
}

TEST_CASE("threshold calibration") {
  std::vector<double> ranks(100);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  CHECK(calibrate_threshold(ranks, 0.05) == 95.0);
  CHECK(calibrate_threshold(ranks, 0.5) == 50.0);
  CHECK(calibrate_threshold(ranks, 0.001) == 100.0);
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>{}, 0.1), Error);

  std::vector<double> sym = {-3, -2, -1, 0, 1, 2, 3};
  CHECK(calibrate_threshold(sym, 0.5) == 0.0);

  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto m = static_cast<std::size_t>(rng.uniform(10, 500));
    std::vector<double> x(m);
    for (double& v : x) v = rng.normal();
    std::sort(x.begin(), x.end());
    const double pfa = rng.uniform(0.001, 0.5);
    const double thr = calibrate_threshold(x, pfa);
    const auto above = static_cast<double>(x.end() - std::upper_bound(x.begin(), x.end(), thr));
    CHECK(above / m <= pfa);
  }
}

TEST_CASE("ROC curves") {
  Rng rng(6);
  std::vector<double> a(5000), b(5000);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const RocCurve same = roc_curve(a, b);
  CHECK(std::abs(same.auc - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 * (2.0 / 5000.0)) + 1e-3);
  CHECK(same.points.front().pfa == 0.0);
  CHECK(same.points.back().pfa == 1.0);
  CHECK(same.points.back().pd == 1.0);
  for (std::size_t i = 1; i < same.points.size(); ++i) {
    CHECK(same.points[i].pfa >= same.points[i - 1].pfa);
    CHECK(same.points[i].pd >= same.points[i - 1].pd);
  }

  std::vector<double> hi(b.size());
  std::transform(b.begin(), b.end(), hi.begin(), [](double v) { return v + 100.0; });
  const RocCurve split = roc_curve(a, hi);
  CHECK(split.auc == 1.0);
  for (double pfa : {1e-3, 1e-2, 0.3}) {
    const PmPoint p = pm_at(a, hi, pfa);
    CHECK(p.pm == 0.0);
    CHECK(p.ci.lo == 0.0);
    CHECK(p.ci.hi > 0.0);
  }

  const std::vector<double> ties = {1.0, 1.0, 2.0};
  const RocCurve tie = roc_curve(ties, ties);
  CHECK(tie.points.size() == 3);
  CHECK(std::abs(tie.auc - 0.5) < 1e-15);
}

TEST_CASE("wilson interval") {
  const BinomialInterval w = wilson_interval(0, 100);
  CHECK(w.lo == 0.0);
  CHECK(std::abs(w.hi - 0.0370) < 1e-3);
  const BinomialInterval m = wilson_interval(50, 100);
  CHECK(std::abs(m.lo - 0.4038) < 1e-3);
  CHECK(std::abs(m.hi - 0.5962) < 1e-3);
}

TEST_CASE("wilks diagnostic") {
  Rng rng(7);
  std::vector<double> chi2(10000);
  for (double& v : chi2) v = -2.0 * std::log(rng.uniform(0.0, 1.0));
  const WilksDiag d = wilks_diag(chi2);
  CHECK(d.ks_distance <= 1.36 / std::sqrt(10000.0) + 0.01);
  CHECK(d.table.size() == 121);
  CHECK(d.table.front().t == 0.0);
  CHECK(std::abs(d.table.back().t - 12.0) < 1e-12);
  CHECK(std::abs(d.table[20].chi2 - (1.0 - std::exp(-1.0))) < 1e-15);

  CHECK(wilks_diag(std::vector<double>(100, 3.0)).ks_distance > 0.75);
  CHECK(wilks_diag(std::vector<double>(100, 50.0)).ks_distance > 0.99);
  CHECK_NOTHROW(wilks_diag({-1e-10, 1.0}));
  CHECK_THROWS_AS(wilks_diag({-1e-3, 1.0}), Error);
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg = small_config(10);
  CHECK_NOTHROW(cfg.validate());
  cfg.trials_h0 = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("trials_h0"), Error);
  cfg = small_config(10);
  cfg.pfa_grid = {0.1, 1.0};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("pfa_grid"), Error);
  cfg = small_config(10);
  cfg.sweep = SweepAxis{SweepAxis::Kind::snr_s_db, {0.0, 0.0}, std::nullopt};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("increasing"), Error);
  cfg = small_config(10);
  cfg.sweep = SweepAxis{SweepAxis::Kind::antennas, {2, 3, 7}, std::nullopt};
  CHECK_THROWS_AS(cfg.validate(), Error);  // N = 12 < 2L at L = 7
  cfg = small_config(10);
  cfg.detectors = DetectorSet{};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("sweep points") {
  ExperimentConfig cfg = small_config(10);
  CHECK(cfg.sweep_points() == 1);
  cfg.sweep = SweepAxis{SweepAxis::Kind::snr_s_db, {-10, 0, 10}, 10.0};
  CHECK(cfg.sweep_points() == 3);
  const ScenarioConfig sc = cfg.scenario_at(2);
  CHECK(sc.snr_s_db == 10.0);
  CHECK(sc.snr_r_db == 20.0);
  CHECK(sc.seed == cfg.scenario.seed);
  cfg.sweep = SweepAxis{SweepAxis::Kind::snapshots, {8, 16}, std::nullopt};
  CHECK(cfg.scenario_at(1).snapshots == 16);
}
