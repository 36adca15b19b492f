#pragma once

#include <optional>
#include <string>

#include "slipkit/errors.hpp"

namespace slipkit {

inline constexpr double kDefaultGravity = 9.81;  // [m/s^2]

/// Fixed single-track geometry. l_w is stored redundantly and always equals
/// l_f + l_r; construct through make() to keep that invariant.
struct VehicleGeometry {
  double l_f = 0.0;  ///< center of mass to front axle [m]
  double l_r = 0.0;  ///< center of mass to rear axle [m]
  double l_w = 0.0;  ///< wheelbase [m]
  double r_e = 0.0;  ///< effective tire radius [m]
  double m = 0.0;    ///< total mass [kg]

  /// Validates all lengths and the mass are finite and positive.
  static VehicleGeometry make(double l_f, double l_r, double r_e, double m);
};

/// Commanded longitudinal speed and steering angle at one instant.
struct ControlAction {
  double v = 0.0;      ///< commanded speed [m/s]
  double delta = 0.0;  ///< steering angle [rad], |delta| < pi/2
};

/// Measured vehicle state at one instant, body frame.
struct Observation {
  double a_x_hat = 0.0;    ///< longitudinal acceleration [m/s^2]
  double a_y_hat = 0.0;    ///< lateral acceleration [m/s^2]
  double v_x_hat = 0.0;    ///< longitudinal velocity [m/s]
  double v_y_hat = 0.0;    ///< lateral velocity [m/s]
  double w_psi_hat = 0.0;  ///< yaw rate [rad/s]
};

/// One telemetry sample: timestamp, command, measurement, optional tags.
struct TelemetryRecord {
  double t = 0.0;  ///< [s], strictly increasing within a stream
  ControlAction u;
  Observation y;
  std::optional<std::string> surface;
  std::optional<bool> slip_label;
};

/// Velocities and spin of a single tire, tire frame.
struct TireState {
  double v_wx = 0.0;   ///< contact-point longitudinal velocity [m/s]
  double v_wy = 0.0;   ///< contact-point lateral velocity [m/s]
  double omega = 0.0;  ///< wheel angular velocity [rad/s]
};

/// In-plane force pair plus the normal load carrying it.
struct PlanarForce {
  double f_x = 0.0;  ///< [N]
  double f_y = 0.0;  ///< [N]
  double f_z = 0.0;  ///< [N], must be positive to normalize against
};

/// Planar pose of the vehicle center of mass.
struct Pose {
  double x = 0.0;    ///< [m]
  double y = 0.0;    ///< [m]
  double psi = 0.0;  ///< heading [rad]
};

/// Angle between the velocity vector at the center of mass and the body
/// x axis under rolling-without-slipping:
///   beta = arctan((l_r / (l_f + l_r)) * tan(delta)).
/// Requires |delta| < pi/2.
double geometric_slip_angle(double delta, const VehicleGeometry& geom);

/// Yaw rate implied by the command under the single-track model:
///   omega_psi = v * tan(delta) / l_w.
/// Requires |delta| < pi/2.
double expected_yaw_rate(const ControlAction& u, const VehicleGeometry& geom);

/// One explicit-Euler step of the kinematic single-track model:
///   x'   = x   + v*cos(psi + beta)*dt
///   y'   = y   + v*sin(psi + beta)*dt
///   psi' = psi + (v / l_r)*sin(beta)*dt
/// with beta = geometric_slip_angle(delta). Requires dt > 0.
Pose kinematic_step(const Pose& state, const ControlAction& u,
                    const VehicleGeometry& geom, double dt);

/// Longitudinal slip ratio
///   kappa = (r_e*omega - v_wx) / max(r_e*omega, v_wx).
/// Undefined (throws UndefinedSlipError) when the tire is at rest or
/// reversing, i.e. unless max(r_e*omega, v_wx) > 0.
double slip_ratio(const TireState& tire, double r_e);

/// Lateral slip angle alpha = arctan(v_wy / v_wx); requires v_wx > 0.
double slip_angle(const TireState& tire);

/// True when both slip quantities are zero within tol: |kappa| <= tol and
/// |alpha| <= tol. tol = 0 demands exact pure rolling.
bool is_pure_rolling(const TireState& tire, double r_e, double tol = 0.0);

/// Fraction of the normal load spent on in-plane force:
///   rho = sqrt(f_x^2 + f_y^2) / f_z.  Requires f_z > 0.
double traction_coefficient(const PlanarForce& f);

/// Same ratio from accelerations, rho = sqrt(a_x^2 + a_y^2) / g; the vehicle
/// mass cancels. Requires g > 0.
double traction_from_accel(const Observation& y, double g = kDefaultGravity);

}  // namespace slipkit
