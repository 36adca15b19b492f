#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slipkit/detector.hpp"
#include "slipkit/estimator.hpp"

namespace slipkit {

/// A labeled event paired with the detection that claimed it.
struct Match {
  SlipEvent labeled;
  SlipEvent detected;
  double delay = 0.0;  ///< detected.onset_t - labeled.onset_t, signed [s]
};

struct EventMatchReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<Match> matches;
};

/// One-to-one greedy matching: candidate pairs within the onset window are
/// taken in order of increasing |delay| (ties by labeled onset, then by
/// detected onset); unmatched detections are fp, unmatched labels fn.
EventMatchReport match_events(std::span<const SlipEvent> labeled,
                              std::span<const SlipEvent> detected,
                              double window = 1.0);

/// Each field is empty when its denominator is zero (no detections for
/// precision, no labels for recall, either for f1).
struct PrfResult {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

PrfResult precision_recall_f1(const EventMatchReport& report);

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  ///< population
  std::size_t n = 0;
};

/// Stats of |delay| grouped by the labeled event's surface tag; untagged
/// events group under kDefaultSurface. Surfaces without matches are absent.
std::map<std::string, SummaryStats> delay_stats(const EventMatchReport& report);

/// One stream's estimate for one surface, for accuracy scoring.
struct StreamEstimate {
  std::string stream_id;
  std::string surface;
  double mu_hat = 0.0;
};

/// Mean absolute error of per-stream estimates against per-surface ground
/// truth. Every estimate's surface must have a ground-truth entry.
std::map<std::string, SummaryStats> mae_stats(
    std::span<const StreamEstimate> estimates,
    const std::map<std::string, double>& ground_truth);

/// Per-record residual traces of one stream, for plotting.
struct ResidualTrace {
  std::string stream_id;
  std::vector<double> t;
  std::vector<double> lin;
  std::vector<double> ang;
  Thresholds thresholds;
};

/// Ground truth against a set of per-stream estimates for one surface.
struct MuComparison {
  std::string surface;
  double ground_truth = 0.0;
  std::vector<double> estimates;
};

struct PlotInputs {
  std::vector<CircleExport> circles;
  std::vector<ResidualTrace> residuals;
  std::vector<MuComparison> comparisons;
};

/// Writes deterministic SVG plots plus plain-text tables of the numbers
/// behind them into out_dir (created if missing). Returns the written
/// paths in emission order. Empty point sets produce a "no data"
/// placeholder rather than an error.
std::vector<std::string> emit_plots(const PlotInputs& inputs, const std::string& out_dir);

}  // namespace slipkit
