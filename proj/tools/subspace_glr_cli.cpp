#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "subspace_glr/config.hpp"
#include "subspace_glr/detectors.hpp"
#include "subspace_glr/errors.hpp"
#include "subspace_glr/experiments.hpp"
#include "subspace_glr/snapshot_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace subspace_glr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunFlags {
  std::string config;
  std::string out = ".";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

struct DetectFlags {
  std::string data;
  std::string steering;
  std::string config;
  std::vector<std::string> thresholds;
  std::vector<std::string> detectors;
};

/// Thrown for runs whose invalid-trial fraction is over the configured cap.
struct TooManyFailures : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void init_logging() {
  auto logger = spdlog::stderr_color_mt("subspace-glr");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("SUBSPACE_GLR_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

ExperimentConfig load_config(const RunFlags& f) {
  ExperimentConfig cfg = load_experiment_config(f.config);
  if (f.seed) {
    cfg.scenario.seed = *f.seed;
    cfg.validate();
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
  spdlog::info("wrote {}", path.string());
}

void warn_small_null_sample(const ExperimentConfig& cfg) {
  for (double pfa : cfg.pfa_grid)
    if (static_cast<double>(cfg.trials_h0) < 10.0 / pfa)
      spdlog::warn("trials_h0 = {} is below 10/pfa for pfa = {}; the threshold is poorly resolved", cfg.trials_h0, pfa);
}

json failures_json(const FailureSummary& f) {
  return {{"trials", f.trials}, {"invalid", f.invalid}, {"rate", f.rate()}, {"examples", f.examples}};
}

void check_failures(const ExperimentConfig& cfg, const FailureSummary& f) {
  for (const auto& e : f.examples) spdlog::warn("invalid trial {}", e);
  if (f.rate() > cfg.max_failure_rate)
    throw TooManyFailures(fmt::format("{} of {} trials invalid (rate {:.3g} > max_failure_rate {:.3g})", f.invalid,
                                      f.trials, f.rate(), cfg.max_failure_rate));
}

void write_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& cfg,
                    const RunFlags& flags, double seconds, const std::map<std::string, std::string>& outputs,
                    const FailureSummary& failures) {
  json m;
  m["command"] = command;
  m["version"] = SUBSPACE_GLR_VERSION;
  m["config"] = json::parse(experiment_config_to_json(cfg));
  m["threads"] = flags.threads;
  m["duration_seconds"] = seconds;
  m["outputs"] = outputs;
  m["failures"] = failures_json(failures);
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path prepare_out(const RunFlags& f) {
  fs::path dir(f.out);
  fs::create_directories(dir);
  return dir;
}

int cmd_roc(const RunFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  warn_small_null_sample(cfg);
  const fs::path dir = prepare_out(f);
  const auto t0 = std::chrono::steady_clock::now();
  spdlog::info("roc: {} + {} trials", cfg.trials_h0, cfg.trials_h1);
  const RocResult r = run_roc(cfg, f.threads);
  const double secs = seconds_since(t0);
  write_file(dir / "roc.csv", roc_csv(r));
  write_file(dir / "auc.csv", auc_csv(r));
  write_file(dir / "roc_calibrated.csv", roc_calibrated_csv(r));
  write_manifest(dir, "roc", cfg, f, secs,
                 {{"roc", "roc.csv"}, {"auc", "auc.csv"}, {"roc_calibrated", "roc_calibrated.csv"}}, r.failures);
  for (const auto& d : r.detectors) spdlog::info("AUC {} = {:.4f}", to_string(d.detector), d.curve.auc);
  check_failures(cfg, r.failures);
  return kExitOk;
}

int cmd_pm_sweep(const RunFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  warn_small_null_sample(cfg);
  const fs::path dir = prepare_out(f);
  const auto t0 = std::chrono::steady_clock::now();
  spdlog::info("pm-sweep: {} points of {} + {} trials", cfg.sweep_points(), cfg.trials_h0, cfg.trials_h1);
  const PmSweepResult r = run_pm_sweep(cfg, f.threads);
  const double secs = seconds_since(t0);
  write_file(dir / "pm.csv", pm_csv(r));
  write_manifest(dir, "pm-sweep", cfg, f, secs, {{"pm", "pm.csv"}}, r.failures);
  check_failures(cfg, r.failures);
  return kExitOk;
}

int cmd_null_dist(const RunFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  const fs::path dir = prepare_out(f);
  const auto t0 = std::chrono::steady_clock::now();
  spdlog::info("null-dist: {} null trials", cfg.trials_h0);
  const NullDistResult r = run_null_dist(cfg, f.threads);
  const double secs = seconds_since(t0);
  write_file(dir / "nulldist.csv", nulldist_csv(r));
  json ks;
  ks["ks_distance"] = r.diag.ks_distance;
  ks["samples"] = r.samples;
  ks["ks_t_min"] = cfg.null_dist.ks_t_min;
  ks["ks_t_max"] = std::isfinite(cfg.null_dist.ks_t_max) ? json(cfg.null_dist.ks_t_max) : json(nullptr);
  write_file(dir / "ks.json", ks.dump(2) + "\n");
  write_manifest(dir, "null-dist", cfg, f, secs, {{"nulldist", "nulldist.csv"}, {"ks", "ks.json"}}, r.failures);
  spdlog::info("KS distance {:.4f} over {} samples", r.diag.ks_distance, r.samples);
  check_failures(cfg, r.failures);
  return kExitOk;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_detect(const DetectFlags& f) {
  TrustRegionOptions opts;
  if (!f.config.empty()) opts = load_experiment_config(f.config).optimizer;
  DetectorSet which = DetectorSet::all();
  if (!f.detectors.empty()) {
    which = DetectorSet{};
    for (const auto& name : f.detectors) which.insert(detector_from_string(name));
  }

  std::vector<std::pair<Detector, double>> thresholds;
  for (const auto& t : f.thresholds) {
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::invalid_argument, "--threshold expects detector=value, got '" + t + "'");
    const Detector d = detector_from_string(t.substr(0, eq));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() - eq - 1)
      throw Error(ErrorKind::invalid_argument, "--threshold value is not a number: '" + t + "'");
    if (!which.contains(d))
      throw Error(ErrorKind::invalid_argument, std::string("--threshold for disabled detector ") + to_string(d));
    thresholds.emplace_back(d, v);
  }

  const SnapshotData data = read_snapshots(f.data);
  const SteeringPair steering = read_steering_json(f.steering);
  if (steering.antennas() != data.antennas())
    throw Error(ErrorKind::invalid_dimension, "steering vectors have length " + std::to_string(steering.antennas()) +
                                                  " but the data has L = " + std::to_string(data.antennas()));
  const DetectorReport rep = evaluate(data, steering, which, opts);

  json out;
  out["L"] = data.antennas();
  out["N"] = data.snapshots();
  json stats;
  stats["glr_1n"] = optional_number(rep.glr_1n);
  stats["two_log_glr"] = optional_number(rep.two_log_glr);
  for (Detector d : kAllDetectors)
    if (d != Detector::glr) stats[to_string(d)] = optional_number(rep.get(d));
  out["statistics"] = stats;
  if (rep.optim) {
    out["optimizer"] = {{"iterations", rep.optim->iterations},
                        {"converged", rep.optim->converged},
                        {"j_value", rep.optim->j_value}};
  }
  if (!thresholds.empty()) {
    json decisions = json::array();
    for (const auto& [d, t] : thresholds) {
      const double v = *rep.get(d);
      decisions.push_back({{"detector", to_string(d)}, {"threshold", t}, {"statistic", v}, {"h1", v > t}});
    }
    out["decisions"] = decisions;
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_validate(const RunFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  std::cout << experiment_config_to_json(cfg) << "\n";
  return kExitOk;
}

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--config", f.config, "experiment config (JSON)")->required();
  sub->add_option("--out", f.out, "output directory")->capture_default_str();
  sub->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
  sub->add_option("--seed", f.seed, "overrides scenario.seed");
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();

  CLI::App app{"Passive detection with known channel subspaces"};
  app.set_version_flag("--version", SUBSPACE_GLR_VERSION);
  app.require_subcommand(1);

  RunFlags roc_f, pm_f, null_f, val_f;
  DetectFlags det_f;
  auto* roc = app.add_subcommand("roc", "ROC curves of every enabled detector");
  add_run_flags(roc, roc_f);
  auto* pm = app.add_subcommand("pm-sweep", "miss probability along the sweep axis");
  add_run_flags(pm, pm_f);
  auto* null = app.add_subcommand("null-dist", "null distribution of 2 log GLR against chi-squared(2)");
  add_run_flags(null, null_f);
  auto* det = app.add_subcommand("detect", "apply the detectors to one stored record");
  det->add_option("--data", det_f.data, "snapshot file (CSV or binary)")->required();
  det->add_option("--steering", det_f.steering, "steering JSON with u_s and u_r")->required();
  det->add_option("--config", det_f.config, "config whose optimizer settings are used");
  det->add_option("--threshold", det_f.thresholds, "detector=value, repeatable");
  det->add_option("--detectors", det_f.detectors, "subset of detectors to evaluate");
  auto* val = app.add_subcommand("validate-config", "parse a config and print it with defaults filled in");
  val->add_option("--config", val_f.config, "experiment config (JSON)")->required();
  val->add_option("--seed", val_f.seed, "overrides scenario.seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*roc) return cmd_roc(roc_f);
    if (*pm) return cmd_pm_sweep(pm_f);
    if (*null) return cmd_null_dist(null_f);
    if (*det) return cmd_detect(det_f);
    if (*val) return cmd_validate(val_f);
  } catch (const TooManyFailures& e) {
    spdlog::error("{}", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.is_numerical() ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return kExitOk;
}
