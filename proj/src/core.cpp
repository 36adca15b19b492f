#include "slipkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace slipkit {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InputDomainError(std::string(name) + " is not finite");
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0) {
    throw InputDomainError(std::string(name) + " must be positive, got " + std::to_string(v));
  }
}

void require_steering(double delta) {
  require_finite(delta, "delta");
  if (!(std::abs(delta) < std::numbers::pi / 2)) {
    throw InputDomainError("delta must satisfy |delta| < pi/2, got " + std::to_string(delta));
  }
}

}  // namespace

VehicleGeometry VehicleGeometry::make(double l_f, double l_r, double r_e, double m) {
  require_positive(l_f, "l_f");
  require_positive(l_r, "l_r");
  require_positive(r_e, "r_e");
  require_positive(m, "m");
  VehicleGeometry g;
  g.l_f = l_f;
  g.l_r = l_r;
  g.l_w = l_f + l_r;
  g.r_e = r_e;
  g.m = m;
  return g;
}

double geometric_slip_angle(double delta, const VehicleGeometry& geom) {
  require_steering(delta);
  require_positive(geom.l_r, "l_r");
  require_positive(geom.l_w, "l_w");
  return std::atan((geom.l_r / geom.l_w) * std::tan(delta));
}

double expected_yaw_rate(const ControlAction& u, const VehicleGeometry& geom) {
  require_finite(u.v, "v");
  require_steering(u.delta);
  require_positive(geom.l_w, "l_w");
  return u.v * std::tan(u.delta) / geom.l_w;
}

Pose kinematic_step(const Pose& state, const ControlAction& u,
                    const VehicleGeometry& geom, double dt) {
  require_finite(state.x, "x");
  require_finite(state.y, "y");
  require_finite(state.psi, "psi");
  require_finite(u.v, "v");
  require_positive(dt, "dt");
  const double beta = geometric_slip_angle(u.delta, geom);
  Pose next;
  next.x = state.x + u.v * std::cos(state.psi + beta) * dt;
  next.y = state.y + u.v * std::sin(state.psi + beta) * dt;
  next.psi = state.psi + (u.v / geom.l_r) * std::sin(beta) * dt;
  return next;
}

double slip_ratio(const TireState& tire, double r_e) {
  require_finite(tire.v_wx, "v_wx");
  require_finite(tire.omega, "omega");
  require_positive(r_e, "r_e");
  const double circumferential = r_e * tire.omega;
  const double denom = std::max(circumferential, tire.v_wx);
  if (!(denom > 0.0)) {
    throw UndefinedSlipError("slip ratio undefined: tire at rest or reversing");
  }
  return (circumferential - tire.v_wx) / denom;
}

double slip_angle(const TireState& tire) {
  require_finite(tire.v_wy, "v_wy");
  require_finite(tire.v_wx, "v_wx");
  if (!(tire.v_wx > 0.0)) {
    throw UndefinedSlipError("slip angle undefined: v_wx must be positive");
  }
  return std::atan(tire.v_wy / tire.v_wx);
}

bool is_pure_rolling(const TireState& tire, double r_e, double tol) {
  require_finite(tol, "tol");
  if (tol < 0.0) {
    throw InputDomainError("tol must be nonnegative");
  }
  return std::abs(slip_ratio(tire, r_e)) <= tol && std::abs(slip_angle(tire)) <= tol;
}

double traction_coefficient(const PlanarForce& f) {
  require_finite(f.f_x, "f_x");
  require_finite(f.f_y, "f_y");
  require_positive(f.f_z, "f_z");
  return std::hypot(f.f_x, f.f_y) / f.f_z;
}

double traction_from_accel(const Observation& y, double g) {
  require_finite(y.a_x_hat, "a_x_hat");
  require_finite(y.a_y_hat, "a_y_hat");
  require_positive(g, "g");
  return std::hypot(y.a_x_hat, y.a_y_hat) / g;
}

}  // namespace slipkit
