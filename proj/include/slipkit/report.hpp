#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "slipkit/calibration.hpp"
#include "slipkit/detector.hpp"
#include "slipkit/estimator.hpp"
#include "slipkit/metrics.hpp"

namespace slipkit::report {

// JSON builders for the documents the command-line tool writes. Values that
// are undefined (no detections, no valid estimate) are emitted as null,
// never as a stand-in number.

nlohmann::json geometry_json(const VehicleGeometry& geom);
nlohmann::json thresholds_json(const Thresholds& th);
nlohmann::json estimate_json(const FrictionEstimate& est);
nlohmann::json prf_json(const PrfResult& prf);
nlohmann::json summary_json(const SummaryStats& stats);
nlohmann::json stats_map_json(const std::map<std::string, SummaryStats>& stats);
nlohmann::json events_json(std::span<const SlipEvent> events);
nlohmann::json match_report_json(const EventMatchReport& report, bool include_matches);
nlohmann::json cross_validation_json(const CrossValidation& cv);
nlohmann::json pull_report_json(const PullTestReport& report);

/// Indented dump with a trailing newline; key order is sorted and stable.
std::string dump(const nlohmann::json& j);

}  // namespace slipkit::report
