#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "slipkit/core.hpp"
#include "slipkit/detector.hpp"
#include "slipkit/estimator.hpp"
#include "slipkit/metrics.hpp"

namespace slipkit {

/// A named telemetry stream, the unit of fold assignment.
struct Stream {
  std::string id;
  std::vector<TelemetryRecord> records;
};

/// Thresholds from pooled command residuals: mean plus two population
/// standard deviations per channel, computed over every sample of every
/// training stream with no labels consulted. Needs at least two samples.
Thresholds compute_thresholds(std::span<const Stream> training,
                              const VehicleGeometry& geom);

struct FoldAssignment {
  int k = 0;
  std::map<std::string, int> assignment;  ///< stream id -> fold in [0, k)
};

/// Shuffles the ids with the seeded portable generator and deals them
/// round-robin, so fold sizes differ by at most one. Requires
/// 2 <= k <= ids.size() and unique ids.
FoldAssignment kfold_split(std::span<const std::string> stream_ids, int k,
                           std::uint64_t seed);

/// Knobs shared by every fold evaluation.
struct EvalConfig {
  EventConfig events;
  double match_window = 1.0;  ///< onset pairing window [s]
  double g = kDefaultGravity;
};

/// Per-stream outcome inside a fold.
struct StreamEvaluation {
  std::string id;
  std::size_t labeled_count = 0;
  std::size_t detected_count = 0;
  EventMatchReport report;
  std::map<std::string, FrictionEstimate> friction;
};

struct FoldResult {
  int index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  Thresholds thresholds;
  EventMatchReport report;  ///< pooled over the fold's test streams
  PrfResult prf;
  std::vector<StreamEvaluation> streams;
};

struct CrossValidation {
  FoldAssignment assignment;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  EventMatchReport pooled;  ///< counts and matches summed over folds
  PrfResult pooled_prf;
};

/// K-fold cross-validation of the full detect pipeline: thresholds are
/// calibrated on each fold's training streams only, then every test stream
/// is scored against its labels. Every record must carry a slip label.
CrossValidation cross_validate(std::span<const Stream> streams, int k,
                               std::uint64_t seed, const VehicleGeometry& geom,
                               const EvalConfig& cfg = {});

enum class PullDirection { lateral, longitudinal, diagonal };

const char* to_string(PullDirection d);

/// One static pull: the tester ramps force until breakaway.
struct PullTrial {
  PullDirection direction = PullDirection::lateral;
  double f_pull = 0.0;    ///< breakaway pull force [N]
  double f_normal = 0.0;  ///< normal load during the pull [N]
};

struct PullStats {
  double mean = 0.0;
  std::size_t n = 0;
};

struct PullTestReport {
  std::map<PullDirection, PullStats> per_direction;
  double overall_mean = 0.0;
  std::size_t n = 0;
};

/// Static friction reference: mu* = f_pull / f_normal per trial, averaged
/// per direction and overall. Forces must be positive.
PullTestReport pull_test_mu(std::span<const PullTrial> trials);

}  // namespace slipkit
