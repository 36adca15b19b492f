#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slipkit/core.hpp"

namespace slipkit {

/// Residual magnitudes at which a sample is flagged. Both must be finite
/// and positive; construct through make().
struct Thresholds {
  double delta_lin = 0.0;  ///< [m/s]
  double delta_ang = 0.0;  ///< [rad/s]

  static Thresholds make(double delta_lin, double delta_ang);
};

/// Per-sample detector outcome. no_slip is always !d_lin && !d_ang.
struct SlipFlags {
  bool d_lin = false;
  bool d_ang = false;
  bool no_slip = true;
};

enum class SlipKind { linear, angular, both };

const char* to_string(SlipKind kind);

/// A contiguous flagged interval.
struct SlipEvent {
  double onset_t = 0.0;  ///< time of the first flagged sample [s]
  double end_t = 0.0;    ///< time of the last flagged sample [s]
  SlipKind kind = SlipKind::linear;  ///< union of triggering channels
  /// Largest triggering residual inside the event. Unit is m/s for linear
  /// events, rad/s for angular ones; for kind == both it is the larger of
  /// the two channel maxima and carries mixed units.
  double peak_residual = 0.0;
  std::optional<std::string> surface;  ///< tag of the first flagged sample
};

/// |v_cmd - v_x_hat|
double linear_residual(const ControlAction& u, const Observation& y);

/// |expected_yaw_rate(u) - w_psi_hat|
double angular_residual(const ControlAction& u, const Observation& y,
                        const VehicleGeometry& geom);

/// Compares both residuals against the thresholds; flags are inclusive
/// (residual >= threshold trips).
SlipFlags detect_step(const TelemetryRecord& rec, const Thresholds& th,
                      const VehicleGeometry& geom);

struct EventConfig {
  /// Flagged samples whose gap is at most this merge into one event [s].
  double refractory = 0.5;
  /// An event is kept only if it contains a run of at least this many
  /// sample-adjacent flagged records. 1 keeps single-sample triggers.
  int min_consecutive = 1;
};

/// Groups per-sample flags into discrete events. records and flags must be
/// parallel arrays; timestamps must be strictly increasing. geom is needed
/// to recompute triggering residuals for the peak fields.
std::vector<SlipEvent> extract_events(std::span<const TelemetryRecord> records,
                                      std::span<const SlipFlags> flags,
                                      const VehicleGeometry& geom,
                                      const EventConfig& cfg = {});

/// Ground-truth events from slip_label, merged with the same refractory
/// rule as detections so event counts are comparable. Every record must be
/// labeled. kind is both and peak_residual is 0 for labeled events.
std::vector<SlipEvent> labeled_events(std::span<const TelemetryRecord> records,
                                      const EventConfig& cfg = {});

/// Optional pre-filter: trailing moving average over v_x_hat and w_psi_hat
/// with the given window length. window <= 1 returns the input unchanged.
std::vector<TelemetryRecord> smooth_observations(
    std::span<const TelemetryRecord> records, int window);

}  // namespace slipkit
