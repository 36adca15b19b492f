#include "slipkit/report.hpp"

namespace slipkit::report {

using nlohmann::json;

json geometry_json(const VehicleGeometry& geom) {
  return json{{"l_f", geom.l_f}, {"l_r", geom.l_r}, {"l_w", geom.l_w},
              {"r_e", geom.r_e}, {"m", geom.m}};
}

json thresholds_json(const Thresholds& th) {
  return json{{"delta_lin", th.delta_lin}, {"delta_ang", th.delta_ang}};
}

json estimate_json(const FrictionEstimate& est) {
  json j;
  j["valid"] = est.valid();
  j["n_samples"] = est.n_samples;
  if (est.valid()) {
    j["mu_hat"] = est.mu_hat;
    j["argmax_t"] = est.argmax_t;
    j["argmax_ax"] = est.argmax_ax;
    j["argmax_ay"] = est.argmax_ay;
  } else {
    j["mu_hat"] = nullptr;
  }
  if (est.surface.has_value()) j["surface"] = *est.surface;
  return j;
}

json prf_json(const PrfResult& prf) {
  json j;
  j["precision"] = prf.precision.has_value() ? json(*prf.precision) : json(nullptr);
  j["recall"] = prf.recall.has_value() ? json(*prf.recall) : json(nullptr);
  j["f1"] = prf.f1.has_value() ? json(*prf.f1) : json(nullptr);
  return j;
}

json summary_json(const SummaryStats& stats) {
  return json{{"mean", stats.mean}, {"std", stats.std}, {"n", stats.n}};
}

json stats_map_json(const std::map<std::string, SummaryStats>& stats) {
  json j = json::object();
  for (const auto& [key, value] : stats) j[key] = summary_json(value);
  return j;
}

json events_json(std::span<const SlipEvent> events) {
  json arr = json::array();
  for (const SlipEvent& e : events) {
    json j{{"onset_t", e.onset_t},
           {"end_t", e.end_t},
           {"kind", to_string(e.kind)},
           {"peak_residual", e.peak_residual}};
    if (e.surface.has_value()) j["surface"] = *e.surface;
    arr.push_back(std::move(j));
  }
  return arr;
}

json match_report_json(const EventMatchReport& report, bool include_matches) {
  json j;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  if (include_matches) {
    json arr = json::array();
    for (const Match& m : report.matches) {
      json mj{{"labeled_onset", m.labeled.onset_t},
              {"detected_onset", m.detected.onset_t},
              {"delay", m.delay}};
      if (m.labeled.surface.has_value()) mj["surface"] = *m.labeled.surface;
      arr.push_back(std::move(mj));
    }
    j["matches"] = std::move(arr);
  }
  return j;
}

json cross_validation_json(const CrossValidation& cv) {
  json j;
  j["seed"] = cv.seed;
  j["k"] = cv.assignment.k;
  j["assignment"] = cv.assignment.assignment;
  json folds = json::array();
  for (const FoldResult& f : cv.folds) {
    json fj;
    fj["index"] = f.index;
    fj["train_ids"] = f.train_ids;
    fj["test_ids"] = f.test_ids;
    fj["thresholds"] = thresholds_json(f.thresholds);
    fj["counts"] = match_report_json(f.report, false);
    fj["precision_recall_f1"] = prf_json(f.prf);
    json streams = json::array();
    for (const StreamEvaluation& s : f.streams) {
      json sj;
      sj["id"] = s.id;
      sj["labeled_events"] = s.labeled_count;
      sj["detected_events"] = s.detected_count;
      sj["counts"] = match_report_json(s.report, false);
      json friction = json::object();
      for (const auto& [surface, est] : s.friction) {
        friction[surface] = estimate_json(est);
      }
      sj["friction"] = std::move(friction);
      streams.push_back(std::move(sj));
    }
    fj["streams"] = std::move(streams);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  j["pooled"] = {{"counts", match_report_json(cv.pooled, false)},
                 {"precision_recall_f1", prf_json(cv.pooled_prf)}};
  return j;
}

json pull_report_json(const PullTestReport& report) {
  json per = json::object();
  for (const auto& [direction, stats] : report.per_direction) {
    per[to_string(direction)] = json{{"mean", stats.mean}, {"n", stats.n}};
  }
  return json{{"per_direction", std::move(per)},
              {"overall_mean", report.overall_mean},
              {"n", report.n}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace slipkit::report
