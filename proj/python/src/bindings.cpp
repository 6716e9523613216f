#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subspace_glr/config.hpp"
#include "subspace_glr/covariance.hpp"
#include "subspace_glr/detectors.hpp"
#include "subspace_glr/errors.hpp"
#include "subspace_glr/experiments.hpp"
#include "subspace_glr/montecarlo.hpp"
#include "subspace_glr/snapshot_io.hpp"

namespace py = pybind11;
using namespace subspace_glr;

namespace {

SteeringPair steering_of(const CVector& u_s, const CVector& u_r) { return SteeringPair::make(u_s, u_r, 1e-9); }

SnapshotData data_of(const CMatrix& y_s, const CMatrix& y_r) {
  SnapshotData d{y_s, y_r, Hypothesis::h0};
  d.validate();
  return d;
}

DetectorSet detectors_of(const std::optional<std::vector<std::string>>& names) {
  if (!names) return DetectorSet::all();
  DetectorSet set;
  for (const auto& n : *names) set.insert(detector_from_string(n));
  return set;
}

TrustRegionOptions optimizer_of(const std::optional<std::string>& config) {
  return config ? parse_experiment_config(*config).optimizer : TrustRegionOptions{};
}

py::dict report_dict(const DetectorReport& r) {
  py::dict out;
  auto put = [&](const char* key, const std::optional<double>& v) {
    out[key] = v ? py::cast(*v) : py::none();
  };
  put("glr_1n", r.glr_1n);
  put("two_log_glr", r.two_log_glr);
  put("lambda_app", r.lambda_app);
  put("lambda_low", r.lambda_low);
  put("sigma_max", r.sigma_max);
  put("t_cc", r.t_cc);
  put("t_svd", r.t_svd);
  if (r.optim) {
    py::dict o;
    o["iterations"] = r.optim->iterations;
    o["converged"] = r.optim->converged;
    o["j_value"] = r.optim->j_value;
    o["j_trace"] = r.optim->j_trace;
    o["x_hat"] = r.optim->x_hat;
    out["optimizer"] = o;
  }
  return out;
}

py::dict failures_dict(const FailureSummary& f) {
  py::dict d;
  d["trials"] = f.trials;
  d["invalid"] = f.invalid;
  d["examples"] = f.examples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detectors for passive sensing with known channel subspaces";
  m.attr("__version__") = SUBSPACE_GLR_VERSION;

  static py::exception<Error> error_type(m, "SubspaceGlrError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.attr("DETECTORS") = [] {
    std::vector<std::string> names;
    for (Detector d : kAllDetectors) names.emplace_back(to_string(d));
    return names;
  }();

  m.def(
      "evaluate",
      [](const CMatrix& y_s, const CMatrix& y_r, const CVector& u_s, const CVector& u_r,
         const std::optional<std::vector<std::string>>& detectors, const std::optional<std::string>& config) {
        const DetectorReport r = evaluate(data_of(y_s, y_r), steering_of(u_s, u_r), detectors_of(detectors),
                                          optimizer_of(config));
        return report_dict(r);
      },
      py::arg("y_s"), py::arg("y_r"), py::arg("u_s"), py::arg("u_r"), py::arg("detectors") = py::none(),
      py::arg("config") = py::none(),
      "Statistics of the enabled detectors on one L x N record. `config` is an experiment config in JSON whose "
      "optimizer settings are used.");

  m.def(
      "sample_cov",
      [](const CMatrix& y_s, const CMatrix& y_r) {
        const BlockSampleCov s = sample_cov(data_of(y_s, y_r));
        return py::make_tuple(s.s_ss(), s.s_sr(), s.s_rr());
      },
      py::arg("y_s"), py::arg("y_r"), "(S_ss, S_sr, S_rr)");

  m.def(
      "coherence_matrix",
      [](const CMatrix& y_s, const CMatrix& y_r) { return CMatrix(coherence_matrix(sample_cov(data_of(y_s, y_r)))); },
      py::arg("y_s"), py::arg("y_r"));

  m.def(
      "simulate",
      [](const std::string& config, std::uint64_t trial_index, bool h1, std::size_t point) {
        const ExperimentConfig cfg = parse_experiment_config(config);
        if (point >= cfg.sweep_points()) throw Error(ErrorKind::invalid_argument, "sweep point out of range");
        const ScenarioConfig sc = cfg.scenario_at(point);
        Rng steer(sc.seed, trial_index, DrawPurpose::steering);
        Rng gains(sc.seed, trial_index, DrawPurpose::gains);
        Rng noise(sc.seed, trial_index, DrawPurpose::noise_covariance);
        Rng snaps(sc.seed, trial_index, DrawPurpose::snapshots);
        const SteeringPair sp = draw_steering(steer, sc.antennas, cfg.steering_mode);
        const ChannelRealization chan = draw_channel(gains, noise, sc);
        const SnapshotData d = synth_snapshots(sc, sp, chan, h1 ? Hypothesis::h1 : Hypothesis::h0, snaps);
        py::dict out;
        out["y_s"] = d.y_s;
        out["y_r"] = d.y_r;
        out["u_s"] = sp.u_s;
        out["u_r"] = sp.u_r;
        return out;
      },
      py::arg("config"), py::arg("trial_index") = 0, py::arg("h1") = true, py::arg("point") = 0,
      "One trial of the simulation model, drawn exactly as the Monte Carlo runner draws it.");

  m.def("resolve_config", [](const std::string& text) { return experiment_config_to_json(parse_experiment_config(text)); },
        py::arg("config"), "Validated config with every default written out (JSON).");

  m.def(
      "run_roc",
      [](const std::string& config, unsigned threads) {
        const ExperimentConfig cfg = parse_experiment_config(config);
        RocResult r;
        {
          py::gil_scoped_release release;
          r = run_roc(cfg, threads);
        }
        py::dict curves;
        for (const auto& d : r.detectors) {
          std::vector<double> pfa, pd;
          for (const auto& p : d.curve.points) {
            pfa.push_back(p.pfa);
            pd.push_back(p.pd);
          }
          py::dict c;
          c["pfa"] = pfa;
          c["pd"] = pd;
          c["auc"] = d.curve.auc;
          curves[to_string(d.detector)] = c;
        }
        py::dict out;
        out["curves"] = curves;
        out["roc_csv"] = roc_csv(r);
        out["auc_csv"] = auc_csv(r);
        out["roc_calibrated_csv"] = roc_calibrated_csv(r);
        out["failures"] = failures_dict(r.failures);
        return out;
      },
      py::arg("config"), py::arg("threads") = 0);

  m.def(
      "run_pm_sweep",
      [](const std::string& config, unsigned threads) {
        const ExperimentConfig cfg = parse_experiment_config(config);
        PmSweepResult r;
        {
          py::gil_scoped_release release;
          r = run_pm_sweep(cfg, threads);
        }
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict d;
          d["detector"] = to_string(row.detector);
          d["sweep_value"] = row.point.sweep_value;
          d["pfa"] = row.point.pfa;
          d["threshold"] = row.point.threshold;
          d["pm"] = row.point.pm;
          d["ci_lo"] = row.point.ci.lo;
          d["ci_hi"] = row.point.ci.hi;
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["pm_csv"] = pm_csv(r);
        out["failures"] = failures_dict(r.failures);
        return out;
      },
      py::arg("config"), py::arg("threads") = 0);

  m.def(
      "run_null_dist",
      [](const std::string& config, unsigned threads) {
        const ExperimentConfig cfg = parse_experiment_config(config);
        NullDistResult r;
        {
          py::gil_scoped_release release;
          r = run_null_dist(cfg, threads);
        }
        py::dict out;
        out["ks_distance"] = r.diag.ks_distance;
        out["samples"] = r.samples;
        out["nulldist_csv"] = nulldist_csv(r);
        out["failures"] = failures_dict(r.failures);
        return out;
      },
      py::arg("config"), py::arg("threads") = 0);

  m.def("calibrate_threshold",
        [](std::vector<double> h0, double pfa) {
          std::sort(h0.begin(), h0.end());
          return calibrate_threshold(h0, pfa);
        },
        py::arg("h0"), py::arg("pfa"));

  m.def(
      "wilson_interval",
      [](std::size_t successes, std::size_t n) {
        const BinomialInterval b = wilson_interval(successes, n);
        return py::make_tuple(b.lo, b.hi);
      },
      py::arg("successes"), py::arg("n"));

  m.def(
      "read_snapshots",
      [](const std::string& path) {
        const SnapshotData d = read_snapshots(path);
        return py::make_tuple(d.y_s, d.y_r);
      },
      py::arg("path"), "(Y_s, Y_r) from a CSV or binary snapshot file");
  m.def(
      "write_snapshots",
      [](const std::string& path, const CMatrix& y_s, const CMatrix& y_r, bool binary) {
        const SnapshotData d = data_of(y_s, y_r);
        if (binary) write_snapshots_binary(d, path);
        else write_snapshots_csv(d, path);
      },
      py::arg("path"), py::arg("y_s"), py::arg("y_r"), py::arg("binary") = false);
  m.def(
      "read_steering",
      [](const std::string& path) {
        const SteeringPair sp = read_steering_json(path);
        return py::make_tuple(sp.u_s, sp.u_r);
      },
      py::arg("path"));
}
