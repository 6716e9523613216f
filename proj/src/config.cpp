#include "subspace_glr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "subspace_glr/errors.hpp"

namespace subspace_glr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& pointer, const std::string& msg) {
  throw Error(ErrorKind::invalid_argument, source + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
}

/// Reads fields of one JSON object and complains about anything left over.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string source, std::string pointer)
      : j_(j), source_(std::move(source)), pointer_(std::move(pointer)) {
    if (!j_.is_object()) fail(source_, pointer_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string at(const std::string& key) const { return pointer_ + "/" + key; }
  const std::string& source() const { return source_; }

  void number(const std::string& key, double& out, bool allow_null_inf = false) {
    const json* v = find(key);
    if (!v) return;
    if (allow_null_inf && v->is_null()) {
      out = std::numeric_limits<double>::infinity();
      return;
    }
    if (!v->is_number()) fail(source_, at(key), "expected a number");
    out = v->get<double>();
    if (!std::isfinite(out)) fail(source_, at(key), "must be finite");
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_number_unsigned()) {
      const auto u = v->get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) fail(source_, at(key), "out of range");
      out = static_cast<Int>(u);
    } else if (v->is_number_integer()) {
      const auto s = v->get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (s < 0) fail(source_, at(key), "must be nonnegative");
      } else {
        if (s < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) ||
            s > static_cast<std::int64_t>(std::numeric_limits<Int>::max()))
          fail(source_, at(key), "out of range");
      }
      out = static_cast<Int>(s);
    } else {
      fail(source_, at(key), "expected an integer");
    }
  }

  void string(const std::string& key, std::string& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string()) fail(source_, at(key), "expected a string");
    out = v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(source_, at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) fail(source_, at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(source_, at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string source_;
  std::string pointer_;
  std::set<std::string> seen_;
};

/// Runs a validator and prefixes its message with the source name.
template <typename F>
void checked(const std::string& source, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.what());
  }
}

ScenarioConfig parse_scenario(const json& j, const std::string& source) {
  ScenarioConfig sc;
  ObjectReader r(j, source, "/scenario");
  r.integer("L", sc.antennas);
  r.integer("N", sc.snapshots);
  r.number("snr_s_db", sc.snr_s_db);
  r.number("snr_r_db", sc.snr_r_db);
  r.number("sigma_x2", sc.sigma_x2);
  r.integer("wishart_dof", sc.wishart_dof);
  r.integer("seed", sc.seed);
  r.finish();
  return sc;
}

TrustRegionOptions parse_optimizer(const json& j, const std::string& source) {
  TrustRegionOptions o;
  ObjectReader r(j, source, "/optimizer");
  r.integer("max_iter", o.max_iter);
  r.number("grad_tol", o.grad_tol);
  r.number("initial_radius", o.initial_radius);
  r.number("min_radius", o.min_radius);
  r.number("accept_ratio", o.accept_ratio);
  r.integer("restarts", o.restarts);
  r.integer("restart_seed", o.restart_seed);
  r.finish();
  return o;
}

SweepAxis parse_sweep(const json& j, const std::string& source) {
  SweepAxis s;
  ObjectReader r(j, source, "/sweep");
  std::string axis = "snr_s_db";
  r.string("axis", axis);
  try {
    s.kind = sweep_kind_from_string(axis);
  } catch (const Error&) {
    fail(source, "/sweep/axis", "expected 'snr_s_db', 'n' or 'l', got '" + axis + "'");
  }
  auto values = r.numbers("values");
  if (!values) fail(source, "/sweep/values", "required");
  s.values = *values;
  if (const json* off = r.find("snr_r_offset_db"); off && !off->is_null()) {
    if (!off->is_number()) fail(source, "/sweep/snr_r_offset_db", "expected a number");
    s.snr_r_offset_db = off->get<double>();
  }
  r.finish();
  return s;
}

NullDistOptions parse_null_dist(const json& j, const std::string& source) {
  NullDistOptions o;
  ObjectReader r(j, source, "/null_dist");
  r.number("ks_t_min", o.ks_t_min);
  r.number("ks_t_max", o.ks_t_max, true);
  r.number("table_max", o.table_max);
  r.number("table_step", o.table_step);
  r.finish();
  return o;
}

DetectorSet parse_detectors(const json& j, const std::string& source) {
  if (!j.is_array()) fail(source, "/detectors", "expected an array of detector names");
  DetectorSet set;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ptr = "/detectors/" + std::to_string(i);
    if (!j[i].is_string()) fail(source, ptr, "expected a string");
    try {
      set.insert(detector_from_string(j[i].get<std::string>()));
    } catch (const Error& e) {
      fail(source, ptr, e.what());
    }
  }
  return set;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::invalid_argument,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }

  ExperimentConfig cfg;
  ObjectReader r(j, source, "");
  if (const json* v = r.find("scenario")) cfg.scenario = parse_scenario(*v, source);
  r.integer("trials_h0", cfg.trials_h0);
  r.integer("trials_h1", cfg.trials_h1);
  if (auto pfa = r.numbers("pfa_grid")) cfg.pfa_grid = *pfa;
  if (const json* v = r.find("sweep"); v && !v->is_null()) cfg.sweep = parse_sweep(*v, source);
  std::string mode = to_string(cfg.steering_mode);
  r.string("steering_mode", mode);
  try {
    cfg.steering_mode = steering_mode_from_string(mode);
  } catch (const Error&) {
    fail(source, "/steering_mode", "expected 'ula-random-doa' or 'random-unit', got '" + mode + "'");
  }
  if (const json* v = r.find("detectors")) cfg.detectors = parse_detectors(*v, source);
  if (const json* v = r.find("optimizer")) cfg.optimizer = parse_optimizer(*v, source);
  r.number("max_failure_rate", cfg.max_failure_rate);
  if (const json* v = r.find("null_dist")) cfg.null_dist = parse_null_dist(*v, source);
  r.finish();

  checked(source, [&] { cfg.validate(); });
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path.string());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg, int indent) {
  json j;
  const ScenarioConfig& sc = cfg.scenario;
  j["scenario"] = {{"L", sc.antennas},           {"N", sc.snapshots},       {"snr_s_db", sc.snr_s_db},
                   {"snr_r_db", sc.snr_r_db},    {"sigma_x2", sc.sigma_x2}, {"wishart_dof", sc.wishart_dof},
                   {"seed", sc.seed}};
  j["trials_h0"] = cfg.trials_h0;
  j["trials_h1"] = cfg.trials_h1;
  j["pfa_grid"] = cfg.pfa_grid;
  if (cfg.sweep) {
    json s = {{"axis", to_string(cfg.sweep->kind)}, {"values", cfg.sweep->values}};
    s["snr_r_offset_db"] = cfg.sweep->snr_r_offset_db ? json(*cfg.sweep->snr_r_offset_db) : json(nullptr);
    j["sweep"] = s;
  } else {
    j["sweep"] = nullptr;
  }
  j["steering_mode"] = to_string(cfg.steering_mode);
  json dets = json::array();
  for (Detector d : kAllDetectors)
    if (cfg.detectors.contains(d)) dets.push_back(to_string(d));
  j["detectors"] = dets;
  const TrustRegionOptions& o = cfg.optimizer;
  j["optimizer"] = {{"max_iter", o.max_iter},         {"grad_tol", o.grad_tol},
                    {"initial_radius", o.initial_radius}, {"min_radius", o.min_radius},
                    {"accept_ratio", o.accept_ratio}, {"restarts", o.restarts},
                    {"restart_seed", o.restart_seed}};
  j["max_failure_rate"] = cfg.max_failure_rate;
  j["null_dist"] = {{"ks_t_min", cfg.null_dist.ks_t_min},
                    {"ks_t_max", number_or_null(cfg.null_dist.ks_t_max)},
                    {"table_max", cfg.null_dist.table_max},
                    {"table_step", cfg.null_dist.table_step}};
  return j.dump(indent);
}

}  // namespace subspace_glr
