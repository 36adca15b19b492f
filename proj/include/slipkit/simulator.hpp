#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slipkit/core.hpp"

namespace slipkit {

/// Standard deviations of the zero-mean gaussian noise added to emitted
/// observations. Zero disables a channel's noise.
struct NoiseSpec {
  double sigma_accel = 0.05;     ///< on a_x_hat and a_y_hat [m/s^2]
  double sigma_vel = 0.02;       ///< on v_x_hat and v_y_hat [m/s]
  double sigma_yaw_rate = 0.01;  ///< on w_psi_hat [rad/s]
};

/// Piecewise-linear command schedule. Commands interpolate inside a
/// segment; a jump between neighbors gives a step input. Time past the
/// last segment holds its end values.
struct ManeuverSegment {
  double duration = 0.0;     ///< [s]
  double v_start = 0.0;      ///< [m/s]
  double v_end = 0.0;
  double delta_start = 0.0;  ///< [rad]
  double delta_end = 0.0;
};

/// Friction schedule entry; applies from t_start until the next entry.
struct SurfaceSegment {
  double t_start = 0.0;
  std::string name = "sim";
  double mu = 1.0;
};

struct SimConfig {
  VehicleGeometry geom;
  double mu_true = 1.0;   ///< used when surfaces is empty
  double dt = 0.025;      ///< [s]
  double duration = 30.0; ///< [s]
  double speed_gain = 2.0;       ///< demanded a_x per unit speed error [1/s]
  double lateral_relaxation = 0.3;  ///< decay constant of built-up v_y [s]
  double g = kDefaultGravity;
  NoiseSpec noise;
  std::vector<ManeuverSegment> maneuver;
  std::vector<SurfaceSegment> surfaces;  ///< optional; single surface if empty
  std::uint64_t seed = 0;
};

/// Friction-limited kinematic run. Each step demands the acceleration that
/// tracks the command schedule; while the demand fits inside mu*g the
/// vehicle follows the kinematic single-track model exactly and the record
/// is labeled no-slip. A demand beyond the circle is scaled radially onto
/// it, yaw rate falls with the same factor, the unmet lateral demand
/// accumulates into a decaying lateral drift and the record is labeled
/// slip. Observations are the pre-update state plus seeded gaussian noise;
/// noise at step i depends only on (seed, i). Records carry surface tags
/// and slip labels.
std::vector<TelemetryRecord> simulate_run(const SimConfig& cfg);

/// Named ready-to-run configs: "cruise" (no slip anywhere), "drift-turn"
/// (slow steering ramp through the limit, then deep), "hard-launch" (speed
/// step saturating the drive), "step-steer" (instant steering step into
/// deep saturation) and "two-surface" (drift maneuvers on two friction
/// levels in one run).
std::map<std::string, SimConfig> standard_scenarios();

}  // namespace slipkit
