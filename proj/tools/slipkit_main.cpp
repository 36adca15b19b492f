// Command-line front end: calibrate, detect, estimate, simulate, evaluate.
// All outputs are deterministic for a given command line and inputs: no
// wall-clock stamps, sorted JSON keys, shortest round-trip numbers, atomic
// file writes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "slipkit/calibration.hpp"
#include "slipkit/core.hpp"
#include "slipkit/detector.hpp"
#include "slipkit/estimator.hpp"
#include "slipkit/kernels.hpp"
#include "slipkit/metrics.hpp"
#include "slipkit/report.hpp"
#include "slipkit/simulator.hpp"
#include "slipkit/telemetry_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slipkit;

namespace {

struct CommonOpts {
  double l_f = 0.159;
  double l_r = 0.171;
  double r_e = 0.054;
  double mass = 3.5;
  double g = kDefaultGravity;
  int threads = 0;
  bool lenient = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--lf", c.l_f, "Center of mass to front axle [m]")->capture_default_str();
  sub->add_option("--lr", c.l_r, "Center of mass to rear axle [m]")->capture_default_str();
  sub->add_option("--re", c.r_e, "Effective tire radius [m]")->capture_default_str();
  sub->add_option("--mass", c.mass, "Vehicle mass [kg]")->capture_default_str();
  sub->add_option("--gravity", c.g, "Gravitational acceleration [m/s^2]")
      ->capture_default_str();
  sub->add_option("--threads", c.threads,
                  "Worker thread count (0 keeps the runtime default)")
      ->capture_default_str();
  sub->add_flag("--lenient", c.lenient,
                "Drop out-of-order records instead of failing");
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

VehicleGeometry geometry_of(const CommonOpts& c) {
  return VehicleGeometry::make(c.l_f, c.l_r, c.r_e, c.mass);
}

json common_config_json(const CommonOpts& c) {
  json j;
  j["geometry"] = report::geometry_json(geometry_of(c));
  j["g"] = c.g;
  j["lenient"] = c.lenient;
  j["threads"] = c.threads;
  return j;
}

struct LoadedInput {
  Stream stream;
  std::string path;
  std::size_t dropped = 0;
};

std::vector<LoadedInput> load_inputs(const std::vector<std::string>& paths,
                                     bool lenient) {
  std::vector<LoadedInput> out;
  for (const std::string& path : paths) {
    LoadResult r = load_stream(
        path, lenient ? HeaderValidation::lenient : HeaderValidation::strict);
    LoadedInput in;
    in.stream.id = fs::path(path).stem().string();
    in.stream.records = std::move(r.records);
    in.path = path;
    in.dropped = r.dropped;
    out.push_back(std::move(in));
  }
  return out;
}

json inputs_json(const std::vector<LoadedInput>& inputs) {
  json arr = json::array();
  for (const LoadedInput& in : inputs) {
    arr.push_back(json{{"id", in.stream.id},
                       {"path", in.path},
                       {"records", in.stream.records.size()},
                       {"dropped", in.dropped}});
  }
  return arr;
}

void write_json_report(const std::string& path, const json& j) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" + p.parent_path().string() +
                    "': " + ec.message());
    }
  }
  write_file_atomic(path, report::dump(j));
}

std::string annotated_line(const TelemetryRecord& r, const SlipFlags& f) {
  std::ostringstream s;
  s << "{\"t\":" << format_double(r.t) << ",\"v\":" << format_double(r.u.v)
    << ",\"delta\":" << format_double(r.u.delta)
    << ",\"ax\":" << format_double(r.y.a_x_hat)
    << ",\"ay\":" << format_double(r.y.a_y_hat)
    << ",\"vx\":" << format_double(r.y.v_x_hat)
    << ",\"vy\":" << format_double(r.y.v_y_hat)
    << ",\"wpsi\":" << format_double(r.y.w_psi_hat);
  if (r.surface.has_value()) s << ",\"surface\":" << json(*r.surface).dump();
  if (r.slip_label.has_value()) s << ",\"slip\":" << (*r.slip_label ? "true" : "false");
  s << ",\"d_lin\":" << (f.d_lin ? "true" : "false")
    << ",\"d_ang\":" << (f.d_ang ? "true" : "false")
    << ",\"no_slip\":" << (f.no_slip ? "true" : "false") << "}\n";
  return s.str();
}

// Thresholds either given on the command line (both or neither) or
// calibrated from the loaded inputs themselves.
struct ThresholdChoice {
  Thresholds value{0.0, 0.0};
  bool self_calibrated = false;
};

ThresholdChoice choose_thresholds(double delta_lin, double delta_ang,
                                  const std::vector<LoadedInput>& inputs,
                                  const VehicleGeometry& geom) {
  ThresholdChoice out;
  if (delta_lin > 0.0 || delta_ang > 0.0) {
    out.value = Thresholds::make(delta_lin, delta_ang);
    return out;
  }
  std::vector<Stream> streams;
  streams.reserve(inputs.size());
  for (const LoadedInput& in : inputs) streams.push_back(in.stream);
  out.value = compute_thresholds(streams, geom);
  out.self_calibrated = true;
  return out;
}

json thresholds_config_json(const ThresholdChoice& choice) {
  json j = report::thresholds_json(choice.value);
  j["source"] = choice.self_calibrated ? "self-calibrated" : "explicit";
  return j;
}

std::map<std::string, double> load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open ground-truth file '" + path + "'");
  }
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string surface;
    if (!(ls >> surface) || surface[0] == '#') continue;
    double mu = 0.0;
    if (!(ls >> mu)) {
      throw ParseError(path + ": line " + std::to_string(line_no) +
                       ": expected '<surface> <mu>'");
    }
    if (!std::isfinite(mu) || mu <= 0.0) {
      throw ValueError(path + ": line " + std::to_string(line_no) +
                       ": mu must be finite and positive");
    }
    out[surface] = mu;
  }
  if (out.empty()) {
    throw ParseError(path + ": no ground-truth entries found");
  }
  return out;
}

int cmd_calibrate(const CommonOpts& common, const std::vector<std::string>& paths,
                  const std::string& output) {
  apply_threads(common.threads);
  const VehicleGeometry geom = geometry_of(common);
  const std::vector<LoadedInput> inputs = load_inputs(paths, common.lenient);

  std::vector<double> lin;
  std::vector<double> ang;
  for (const LoadedInput& in : inputs) {
    const kernels::ResidualBatch batch = kernels::compute_residuals(in.stream.records, geom);
    lin.insert(lin.end(), batch.lin.begin(), batch.lin.end());
    ang.insert(ang.end(), batch.ang.begin(), batch.ang.end());
  }
  std::vector<Stream> streams;
  for (const LoadedInput& in : inputs) streams.push_back(in.stream);
  const Thresholds th = compute_thresholds(streams, geom);
  const kernels::MeanStd lin_stats = kernels::mean_std(lin);
  const kernels::MeanStd ang_stats = kernels::mean_std(ang);

  json j;
  j["command"] = "calibrate";
  j["config"] = common_config_json(common);
  j["config"]["inputs"] = paths;
  j["inputs"] = inputs_json(inputs);
  j["residuals"] = {
      {"lin", {{"mean", lin_stats.mean}, {"std", lin_stats.std}, {"n", lin_stats.n}}},
      {"ang", {{"mean", ang_stats.mean}, {"std", ang_stats.std}, {"n", ang_stats.n}}}};
  j["thresholds"] = report::thresholds_json(th);
  write_json_report(output, j);
  std::cout << "calibrated thresholds: delta_lin=" << format_double(th.delta_lin)
            << " delta_ang=" << format_double(th.delta_ang) << "\n";
  return 0;
}

int cmd_detect(const CommonOpts& common, const std::string& input,
               const std::string& outdir, double delta_lin, double delta_ang,
               double refractory, int min_consecutive, int smooth) {
  apply_threads(common.threads);
  const VehicleGeometry geom = geometry_of(common);
  std::vector<LoadedInput> inputs = load_inputs({input}, common.lenient);
  if (smooth > 1) {
    inputs[0].stream.records = smooth_observations(inputs[0].stream.records, smooth);
  }
  const ThresholdChoice th = choose_thresholds(delta_lin, delta_ang, inputs, geom);

  EventConfig events_cfg;
  events_cfg.refractory = refractory;
  events_cfg.min_consecutive = min_consecutive;

  const Stream& stream = inputs[0].stream;
  const std::vector<SlipFlags> flags = kernels::detect_flags(stream.records, th.value, geom);
  const std::vector<SlipEvent> events = extract_events(stream.records, flags, geom, events_cfg);

  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + outdir + "': " + ec.message());
  }

  json j;
  j["command"] = "detect";
  j["config"] = common_config_json(common);
  j["config"]["input"] = input;
  j["config"]["thresholds"] = thresholds_config_json(th);
  j["config"]["refractory"] = refractory;
  j["config"]["min_consecutive"] = min_consecutive;
  j["config"]["smooth"] = smooth;
  j["stream"] = inputs_json(inputs)[0];
  j["events"] = report::events_json(events);
  j["count"] = events.size();
  write_json_report((fs::path(outdir) / "events.json").string(), j);

  std::ostringstream annotated;
  for (std::size_t i = 0; i < stream.records.size(); ++i) {
    annotated << annotated_line(stream.records[i], flags[i]);
  }
  write_file_atomic((fs::path(outdir) / "annotated.jsonl").string(), annotated.str());

  std::cout << "detected " << events.size() << " event" << (events.size() == 1 ? "" : "s")
            << "\n";
  return 0;
}

int cmd_estimate(const CommonOpts& common, const std::vector<std::string>& paths,
                 const std::string& outdir, double delta_lin, double delta_ang) {
  apply_threads(common.threads);
  const VehicleGeometry geom = geometry_of(common);
  const std::vector<LoadedInput> inputs = load_inputs(paths, common.lenient);
  const ThresholdChoice th = choose_thresholds(delta_lin, delta_ang, inputs, geom);

  std::vector<std::string> warnings;
  std::map<std::string, CircleExport> pooled_circles;
  json streams_json = json::array();

  for (const LoadedInput& in : inputs) {
    std::map<std::string, CircleExport> circles =
        friction_circle_points(in.stream.records, th.value, geom, common.g);
    json surfaces = json::object();
    for (auto& [surface, circle] : circles) {
      surfaces[surface] = report::estimate_json(circle.estimate);
      if (!circle.estimate.valid()) {
        warnings.push_back("stream '" + in.stream.id + "' surface '" + surface +
                           "': every sample was flagged, no estimate");
      }
      CircleExport& pooled = pooled_circles[surface];
      if (pooled.surface.empty()) {
        pooled.surface = surface;
        pooled.estimate.surface = surface;
      }
      pooled.points.insert(pooled.points.end(), circle.points.begin(), circle.points.end());
      pooled.estimate.n_samples += circle.estimate.n_samples;
      if (circle.estimate.valid() &&
          (pooled.estimate.n_samples == circle.estimate.n_samples ||
           circle.estimate.mu_hat > pooled.estimate.mu_hat)) {
        pooled.estimate.mu_hat = circle.estimate.mu_hat;
        pooled.estimate.argmax_t = circle.estimate.argmax_t;
        pooled.estimate.argmax_ax = circle.estimate.argmax_ax;
        pooled.estimate.argmax_ay = circle.estimate.argmax_ay;
      }
    }
    streams_json.push_back(json{{"id", in.stream.id},
                                {"path", in.path},
                                {"surfaces", std::move(surfaces)}});
  }

  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + outdir + "': " + ec.message());
  }

  json pooled_json = json::object();
  for (const auto& [surface, circle] : pooled_circles) {
    pooled_json[surface] = report::estimate_json(circle.estimate);
    std::ostringstream table;
    write_circle_export(table, circle);
    write_file_atomic((fs::path(outdir) / ("circle_" + surface + ".txt")).string(),
                      table.str());
  }

  json j;
  j["command"] = "estimate";
  j["config"] = common_config_json(common);
  j["config"]["inputs"] = paths;
  j["config"]["thresholds"] = thresholds_config_json(th);
  j["inputs"] = inputs_json(inputs);
  j["streams"] = std::move(streams_json);
  j["pooled"] = std::move(pooled_json);
  j["warnings"] = warnings;
  write_json_report((fs::path(outdir) / "friction.json").string(), j);

  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "estimated " << pooled_circles.size() << " surface"
            << (pooled_circles.size() == 1 ? "" : "s") << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario, const std::string& output, double mu,
                 std::uint64_t seed, bool seed_given, double duration,
                 double noise_accel, double noise_vel, double noise_yaw,
                 bool zero_noise) {
  std::map<std::string, SimConfig> scenarios = standard_scenarios();
  const auto it = scenarios.find(scenario);
  if (it == scenarios.end()) {
    std::string names;
    for (const auto& entry : scenarios) {
      if (!names.empty()) names += ", ";
      names += entry.first;
    }
    throw InputDomainError("unknown scenario '" + scenario + "' (available: " + names + ")");
  }
  SimConfig cfg = it->second;
  if (mu > 0.0) {
    if (!cfg.surfaces.empty()) {
      throw InputDomainError("scenario '" + scenario +
                             "' uses a surface schedule; --mu does not apply");
    }
    cfg.mu_true = mu;
  }
  if (seed_given) cfg.seed = seed;
  if (duration > 0.0) cfg.duration = duration;
  if (zero_noise) cfg.noise = NoiseSpec{0.0, 0.0, 0.0};
  if (noise_accel >= 0.0) cfg.noise.sigma_accel = noise_accel;
  if (noise_vel >= 0.0) cfg.noise.sigma_vel = noise_vel;
  if (noise_yaw >= 0.0) cfg.noise.sigma_yaw_rate = noise_yaw;

  const std::vector<TelemetryRecord> records = simulate_run(cfg);

  LogHeader header;
  header.rate_hint = 1.0 / cfg.dt;
  header.geometry = cfg.geom;
  header.metadata["scenario"] = scenario;
  header.metadata["seed"] = std::to_string(cfg.seed);
  if (cfg.surfaces.empty()) {
    header.metadata["mu_true"] = format_double(cfg.mu_true);
  } else {
    std::string schedule;
    for (const SurfaceSegment& seg : cfg.surfaces) {
      if (!schedule.empty()) schedule += ";";
      schedule += seg.name + "=" + format_double(seg.mu);
    }
    header.metadata["mu_true"] = schedule;
  }

  fs::path out_path(output);
  if (out_path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out_path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" + out_path.parent_path().string() +
                    "': " + ec.message());
    }
  }
  write_stream(output, records, &header);
  std::cout << "wrote " << records.size() << " records to " << output << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::vector<std::string>& paths,
                 const std::string& outdir, int k, std::uint64_t seed, double window,
                 double refractory, int min_consecutive,
                 const std::string& ground_truth_path) {
  apply_threads(common.threads);
  const VehicleGeometry geom = geometry_of(common);
  const std::vector<LoadedInput> inputs = load_inputs(paths, common.lenient);

  std::vector<Stream> streams;
  streams.reserve(inputs.size());
  for (const LoadedInput& in : inputs) streams.push_back(in.stream);

  EvalConfig cfg;
  cfg.events.refractory = refractory;
  cfg.events.min_consecutive = min_consecutive;
  cfg.match_window = window;
  cfg.g = common.g;

  const CrossValidation cv = cross_validate(streams, k, seed, geom, cfg);

  // Per-stream friction estimates, each from the fold that tested it.
  std::vector<StreamEstimate> per_stream;
  std::map<std::string, CircleExport> pooled_circles;
  std::vector<ResidualTrace> traces;
  std::vector<std::string> warnings;
  std::map<std::string, const Stream*> by_id;
  for (const Stream& s : streams) by_id[s.id] = &s;

  for (const FoldResult& fold : cv.folds) {
    for (const StreamEvaluation& ev : fold.streams) {
      const Stream& stream = *by_id.at(ev.id);
      for (const auto& [surface, est] : ev.friction) {
        if (est.valid()) {
          per_stream.push_back(StreamEstimate{ev.id, surface, est.mu_hat});
        } else {
          warnings.push_back("stream '" + ev.id + "' surface '" + surface +
                             "': every sample was flagged, no estimate");
        }
      }
      std::map<std::string, CircleExport> circles =
          friction_circle_points(stream.records, fold.thresholds, geom, common.g);
      for (auto& [surface, circle] : circles) {
        CircleExport& pooled = pooled_circles[surface];
        if (pooled.surface.empty()) {
          pooled.surface = surface;
          pooled.estimate.surface = surface;
        }
        pooled.points.insert(pooled.points.end(), circle.points.begin(),
                             circle.points.end());
        const bool first_valid =
            circle.estimate.valid() && pooled.estimate.n_samples == 0;
        if (first_valid || (circle.estimate.valid() &&
                            circle.estimate.mu_hat > pooled.estimate.mu_hat)) {
          const std::size_t keep_n = pooled.estimate.n_samples;
          pooled.estimate = circle.estimate;
          pooled.estimate.surface = surface;
          pooled.estimate.n_samples = keep_n;
        }
        pooled.estimate.n_samples += circle.estimate.n_samples;
      }
      ResidualTrace trace;
      trace.stream_id = ev.id;
      trace.thresholds = fold.thresholds;
      const kernels::ResidualBatch batch = kernels::compute_residuals(stream.records, geom);
      trace.t.reserve(stream.records.size());
      for (const TelemetryRecord& r : stream.records) trace.t.push_back(r.t);
      trace.lin = batch.lin;
      trace.ang = batch.ang;
      traces.push_back(std::move(trace));
    }
  }
  std::sort(per_stream.begin(), per_stream.end(),
            [](const StreamEstimate& a, const StreamEstimate& b) {
              if (a.stream_id != b.stream_id) return a.stream_id < b.stream_id;
              return a.surface < b.surface;
            });
  std::sort(traces.begin(), traces.end(),
            [](const ResidualTrace& a, const ResidualTrace& b) {
              return a.stream_id < b.stream_id;
            });

  json j;
  j["command"] = "evaluate";
  j["config"] = common_config_json(common);
  j["config"]["inputs"] = paths;
  j["config"]["k"] = k;
  j["config"]["seed"] = seed;
  j["config"]["window"] = window;
  j["config"]["refractory"] = refractory;
  j["config"]["min_consecutive"] = min_consecutive;
  if (!ground_truth_path.empty()) j["config"]["ground_truth"] = ground_truth_path;
  j["inputs"] = inputs_json(inputs);
  j["cross_validation"] = report::cross_validation_json(cv);
  j["delay_stats"] = report::stats_map_json(delay_stats(cv.pooled));

  json friction;
  json per_stream_json = json::array();
  for (const StreamEstimate& e : per_stream) {
    per_stream_json.push_back(
        json{{"stream", e.stream_id}, {"surface", e.surface}, {"mu_hat", e.mu_hat}});
  }
  friction["per_stream"] = std::move(per_stream_json);
  json pooled_friction = json::object();
  for (const auto& [surface, circle] : pooled_circles) {
    pooled_friction[surface] = report::estimate_json(circle.estimate);
  }
  friction["pooled"] = std::move(pooled_friction);

  std::vector<MuComparison> comparisons;
  if (!ground_truth_path.empty()) {
    const std::map<std::string, double> gt = load_ground_truth(ground_truth_path);
    friction["mae"] = report::stats_map_json(mae_stats(per_stream, gt));
    json pooled_err = json::object();
    for (const auto& [surface, circle] : pooled_circles) {
      const auto it = gt.find(surface);
      if (it == gt.end()) {
        throw InputDomainError("no ground truth for surface '" + surface + "'");
      }
      pooled_err[surface] = circle.estimate.valid()
                                ? json(std::abs(circle.estimate.mu_hat - it->second))
                                : json(nullptr);
    }
    friction["pooled_max_abs_error"] = std::move(pooled_err);
    for (const auto& [surface, mu] : gt) {
      MuComparison c;
      c.surface = surface;
      c.ground_truth = mu;
      for (const StreamEstimate& e : per_stream) {
        if (e.surface == surface) c.estimates.push_back(e.mu_hat);
      }
      comparisons.push_back(std::move(c));
    }
  }
  j["friction"] = std::move(friction);
  j["warnings"] = warnings;

  PlotInputs plots;
  for (const auto& [surface, circle] : pooled_circles) plots.circles.push_back(circle);
  plots.residuals = std::move(traces);
  plots.comparisons = std::move(comparisons);
  const std::vector<std::string> written =
      emit_plots(plots, (fs::path(outdir) / "plots").string());
  j["plots"] = written;

  write_json_report((fs::path(outdir) / "report.json").string(), j);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "evaluated " << streams.size() << " streams over " << k << " folds";
  if (cv.pooled_prf.f1.has_value()) {
    std::cout << ", pooled f1 " << format_double(*cv.pooled_prf.f1);
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tire slip detection and road friction estimation toolkit"};
  app.set_config("--config", "", "Read options from an INI file")->envname("SLIPKIT_CONFIG");
  app.require_subcommand(1);

  // calibrate
  CommonOpts cal_common;
  std::vector<std::string> cal_inputs;
  std::string cal_output;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Compute detection thresholds from telemetry streams");
  add_common(cal, cal_common);
  cal->add_option("inputs", cal_inputs, "Telemetry streams (JSONL or CSV)")
      ->required()
      ->expected(-1);
  cal->add_option("-o,--output", cal_output, "Report path (JSON)")->required();

  // detect
  CommonOpts det_common;
  std::string det_input;
  std::string det_outdir;
  double det_lin = 0.0;
  double det_ang = 0.0;
  double det_refractory = 0.5;
  int det_min_consecutive = 1;
  int det_smooth = 0;
  CLI::App* det = app.add_subcommand("detect", "Flag slip samples and extract events");
  add_common(det, det_common);
  det->add_option("input", det_input, "Telemetry stream")->required();
  det->add_option("-o,--output", det_outdir, "Output directory")->required();
  CLI::Option* det_lin_opt = det->add_option("--delta-lin", det_lin,
                                             "Speed residual threshold [m/s]")
                                 ->check(CLI::PositiveNumber);
  CLI::Option* det_ang_opt = det->add_option("--delta-ang", det_ang,
                                             "Yaw-rate residual threshold [rad/s]")
                                 ->check(CLI::PositiveNumber);
  det_lin_opt->needs(det_ang_opt);
  det_ang_opt->needs(det_lin_opt);
  det->add_option("--refractory", det_refractory,
                  "Merge gap between flagged runs [s]")
      ->capture_default_str();
  det->add_option("--min-consecutive", det_min_consecutive,
                  "Flagged samples required to keep an event")
      ->capture_default_str();
  det->add_option("--smooth", det_smooth,
                  "Trailing moving-average window over measured speed and yaw rate "
                  "(0 or 1 disables)")
      ->capture_default_str();

  // estimate
  CommonOpts est_common;
  std::vector<std::string> est_inputs;
  std::string est_outdir;
  double est_lin = 0.0;
  double est_ang = 0.0;
  CLI::App* est = app.add_subcommand(
      "estimate", "Estimate the friction limit from cleared samples");
  add_common(est, est_common);
  est->add_option("inputs", est_inputs, "Telemetry streams")->required()->expected(-1);
  est->add_option("-o,--output", est_outdir, "Output directory")->required();
  CLI::Option* est_lin_opt = est->add_option("--delta-lin", est_lin,
                                             "Speed residual threshold [m/s]")
                                 ->check(CLI::PositiveNumber);
  CLI::Option* est_ang_opt = est->add_option("--delta-ang", est_ang,
                                             "Yaw-rate residual threshold [rad/s]")
                                 ->check(CLI::PositiveNumber);
  est_lin_opt->needs(est_ang_opt);
  est_ang_opt->needs(est_lin_opt);

  // simulate
  std::string sim_scenario;
  std::string sim_output;
  double sim_mu = 0.0;
  std::uint64_t sim_seed = 0;
  double sim_duration = 0.0;
  double sim_noise_accel = -1.0;
  double sim_noise_vel = -1.0;
  double sim_noise_yaw = -1.0;
  bool sim_zero_noise = false;
  bool sim_list = false;
  CLI::App* sim = app.add_subcommand("simulate", "Generate a labeled synthetic run");
  sim->add_option("--scenario", sim_scenario, "Scenario name (see --list-scenarios)");
  sim->add_option("-o,--output", sim_output, "Output stream path (JSONL)");
  sim->add_option("--mu", sim_mu, "Override the true friction coefficient")
      ->check(CLI::PositiveNumber);
  CLI::Option* sim_seed_opt = sim->add_option("--seed", sim_seed, "Noise seed");
  sim->add_option("--duration", sim_duration, "Override run length [s]")
      ->check(CLI::PositiveNumber);
  sim->add_option("--noise-accel", sim_noise_accel,
                  "Accelerometer noise sigma [m/s^2]")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--noise-vel", sim_noise_vel, "Velocity noise sigma [m/s]")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--noise-yaw", sim_noise_yaw, "Yaw-rate noise sigma [rad/s]")
      ->check(CLI::NonNegativeNumber);
  sim->add_flag("--zero-noise", sim_zero_noise, "Disable all measurement noise");
  sim->add_flag("--list-scenarios", sim_list, "List scenario names and exit");

  // evaluate
  CommonOpts ev_common;
  std::vector<std::string> ev_inputs;
  std::string ev_outdir;
  int ev_k = 5;
  std::uint64_t ev_seed = 42;
  double ev_window = 1.0;
  double ev_refractory = 0.5;
  int ev_min_consecutive = 1;
  std::string ev_ground_truth;
  CLI::App* ev = app.add_subcommand(
      "evaluate", "Cross-validated detection and estimation scoring");
  add_common(ev, ev_common);
  ev->add_option("inputs", ev_inputs, "Labeled telemetry streams")
      ->required()
      ->expected(-1);
  ev->add_option("-o,--output", ev_outdir, "Output directory")->required();
  ev->add_option("--k", ev_k, "Fold count")->capture_default_str();
  ev->add_option("--seed", ev_seed, "Fold assignment seed")->capture_default_str();
  ev->add_option("--window", ev_window, "Event matching window [s]")
      ->capture_default_str();
  ev->add_option("--refractory", ev_refractory, "Merge gap between flagged runs [s]")
      ->capture_default_str();
  ev->add_option("--min-consecutive", ev_min_consecutive,
                 "Flagged samples required to keep an event")
      ->capture_default_str();
  ev->add_option("--ground-truth", ev_ground_truth,
                 "Per-surface true friction file ('<surface> <mu>' lines)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*cal) return cmd_calibrate(cal_common, cal_inputs, cal_output);
    if (*det) {
      return cmd_detect(det_common, det_input, det_outdir, det_lin, det_ang,
                        det_refractory, det_min_consecutive, det_smooth);
    }
    if (*est) return cmd_estimate(est_common, est_inputs, est_outdir, est_lin, est_ang);
    if (*sim) {
      if (sim_list) {
        for (const auto& entry : standard_scenarios()) {
          std::cout << entry.first << "\n";
        }
        return 0;
      }
      if (sim_scenario.empty() || sim_output.empty()) {
        std::cerr << "usage error: simulate needs --scenario and --output\n";
        return 1;
      }
      return cmd_simulate(sim_scenario, sim_output, sim_mu, sim_seed,
                          sim_seed_opt->count() > 0, sim_duration, sim_noise_accel,
                          sim_noise_vel, sim_noise_yaw, sim_zero_noise);
    }
    if (*ev) {
      return cmd_evaluate(ev_common, ev_inputs, ev_outdir, ev_k, ev_seed, ev_window,
                          ev_refractory, ev_min_consecutive, ev_ground_truth);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
