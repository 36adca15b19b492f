#include "slipkit/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slipkit/rng.hpp"

namespace slipkit {

namespace {

void validate(const SimConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InputDomainError(std::string(name) + " must be finite and positive");
    }
  };
  positive(cfg.geom.l_f, "l_f");
  positive(cfg.geom.l_r, "l_r");
  positive(cfg.geom.l_w, "l_w");
  positive(cfg.dt, "dt");
  positive(cfg.g, "g");
  positive(cfg.lateral_relaxation, "lateral_relaxation");
  positive(cfg.speed_gain, "speed_gain");
  if (!std::isfinite(cfg.duration) || cfg.duration < cfg.dt) {
    throw InputDomainError("duration must be at least one sample period");
  }
  if (cfg.surfaces.empty()) {
    positive(cfg.mu_true, "mu_true");
  }
  for (std::size_t i = 0; i < cfg.surfaces.size(); ++i) {
    positive(cfg.surfaces[i].mu, "surface mu");
    if (!std::isfinite(cfg.surfaces[i].t_start)) {
      throw InputDomainError("surface t_start must be finite");
    }
    if (i > 0 && !(cfg.surfaces[i].t_start > cfg.surfaces[i - 1].t_start)) {
      throw InputDomainError("surface segments must have increasing t_start");
    }
  }
  auto noise_ok = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputDomainError(std::string(name) + " must be finite and nonnegative");
    }
  };
  noise_ok(cfg.noise.sigma_accel, "sigma_accel");
  noise_ok(cfg.noise.sigma_vel, "sigma_vel");
  noise_ok(cfg.noise.sigma_yaw_rate, "sigma_yaw_rate");
  for (const ManeuverSegment& seg : cfg.maneuver) {
    if (!std::isfinite(seg.duration) || seg.duration < 0.0) {
      throw InputDomainError("maneuver segment duration must be nonnegative");
    }
    for (double d : {seg.delta_start, seg.delta_end}) {
      if (!std::isfinite(d) || !(std::abs(d) < std::numbers::pi / 2)) {
        throw InputDomainError("maneuver delta must satisfy |delta| < pi/2");
      }
    }
    if (!std::isfinite(seg.v_start) || !std::isfinite(seg.v_end)) {
      throw InputDomainError("maneuver speeds must be finite");
    }
  }
}

ControlAction command_at(const std::vector<ManeuverSegment>& maneuver, double t) {
  ControlAction u;
  if (maneuver.empty()) return u;
  double start = 0.0;
  for (const ManeuverSegment& seg : maneuver) {
    if (t < start + seg.duration) {
      const double a = (seg.duration > 0.0) ? (t - start) / seg.duration : 1.0;
      u.v = seg.v_start + (seg.v_end - seg.v_start) * a;
      u.delta = seg.delta_start + (seg.delta_end - seg.delta_start) * a;
      return u;
    }
    start += seg.duration;
  }
  u.v = maneuver.back().v_end;
  u.delta = maneuver.back().delta_end;
  return u;
}

struct SurfaceAt {
  const char* fallback;
  const std::vector<SurfaceSegment>& segments;
  double mu_true;

  std::pair<std::string, double> operator()(double t) const {
    if (segments.empty()) return {fallback, mu_true};
    const SurfaceSegment* active = &segments.front();
    for (const SurfaceSegment& seg : segments) {
      if (seg.t_start <= t) active = &seg;
    }
    return {active->name, active->mu};
  }
};

}  // namespace

std::vector<TelemetryRecord> simulate_run(const SimConfig& cfg) {
  validate(cfg);
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const SurfaceAt surface_at{"sim", cfg.surfaces, cfg.mu_true};
  const double decay = std::exp(-cfg.dt / cfg.lateral_relaxation);

  std::vector<TelemetryRecord> out;
  out.reserve(steps);

  double v_x = 0.0;
  double v_y = 0.0;

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    const ControlAction u = command_at(cfg.maneuver, t);
    const auto [surface_name, mu] = surface_at(t);
    const double limit = mu * cfg.g;

    // Demands that would track the command under the kinematic model.
    const double a_x_dem = cfg.speed_gain * (u.v - v_x);
    const double psi_dot_kin = v_x * std::tan(u.delta) / cfg.geom.l_w;
    const double a_y_dem = v_x * psi_dot_kin;
    const double demand = std::hypot(a_x_dem, a_y_dem);

    double a_x_real = a_x_dem;
    double a_y_real = a_y_dem;
    double w_real = psi_dot_kin;
    const bool slipping = demand > limit;
    if (slipping) {
      const double scale = limit / demand;
      a_x_real *= scale;
      a_y_real *= scale;
      // Radial scaling can land a rounding step outside the circle; nudge
      // back so emitted magnitudes never exceed the limit meaningfully.
      while (std::hypot(a_x_real, a_y_real) > limit) {
        a_x_real *= 1.0 - 0x1.0p-52;
        a_y_real *= 1.0 - 0x1.0p-52;
      }
      w_real = psi_dot_kin * scale;
    }

    // Observations reflect the state entering this step.
    TelemetryRecord rec;
    rec.t = t;
    rec.u = u;
    rec.surface = surface_name;
    rec.slip_label = slipping;
    Rng noise(mix_seed(cfg.seed, i));
    rec.y.a_x_hat = a_x_real + noise.gaussian(0.0, cfg.noise.sigma_accel);
    rec.y.a_y_hat = a_y_real + noise.gaussian(0.0, cfg.noise.sigma_accel);
    rec.y.v_x_hat = v_x + noise.gaussian(0.0, cfg.noise.sigma_vel);
    rec.y.v_y_hat = v_y + noise.gaussian(0.0, cfg.noise.sigma_vel);
    rec.y.w_psi_hat = w_real + noise.gaussian(0.0, cfg.noise.sigma_yaw_rate);
    out.push_back(std::move(rec));

    // Integrate to the next step.
    v_x += a_x_real * cfg.dt;
    if (slipping) {
      v_y = v_y * decay + (a_y_dem - a_y_real) * cfg.dt;
    } else {
      v_y *= decay;
    }
  }
  return out;
}

std::map<std::string, SimConfig> standard_scenarios() {
  const VehicleGeometry geom = VehicleGeometry::make(0.159, 0.171, 0.054, 3.5);

  // Steering angles that demand 1.05 g and 1.5 g of lateral acceleration
  // at 3 m/s on the default geometry; the slow ramp crosses any mu in
  // (0, 1.05) with fine per-sample granularity, the fast one goes deep.
  const double v_turn = 3.0;
  const double delta_boundary = std::atan(1.05 * 9.81 * 0.33 / (v_turn * v_turn));
  const double delta_deep = std::atan(1.5 * 9.81 * 0.33 / (v_turn * v_turn));

  std::map<std::string, SimConfig> out;

  {
    SimConfig cfg;
    cfg.geom = geom;
    cfg.mu_true = 1.0;
    cfg.duration = 30.0;
    cfg.seed = 1;
    cfg.maneuver = {
        {6.0, 0.0, 3.0, 0.0, 0.0},
        {8.0, 3.0, 3.0, 0.0, 0.0},
        {8.0, 3.0, 3.0, 0.08, 0.08},
        {8.0, 3.0, 3.0, 0.0, 0.0},
    };
    out.emplace("cruise", std::move(cfg));
  }

  {
    SimConfig cfg;
    cfg.geom = geom;
    cfg.mu_true = 0.7;
    cfg.duration = 30.0;
    cfg.seed = 2;
    cfg.maneuver = {
        {6.0, 0.0, 3.0, 0.0, 0.0},
        {4.0, 3.0, 3.0, 0.0, 0.0},
        {3.5, 3.0, 3.0, 0.0, delta_boundary},
        {0.5, 3.0, 3.0, delta_boundary, delta_deep},
        {0.5, 3.0, 3.0, delta_deep, delta_deep},
        {0.3, 3.0, 3.0, delta_deep, 0.0},
        {15.2, 3.0, 3.0, 0.0, 0.0},
    };
    out.emplace("drift-turn", std::move(cfg));
  }

  {
    SimConfig cfg;
    cfg.geom = geom;
    cfg.mu_true = 0.7;
    cfg.duration = 30.0;
    cfg.seed = 3;
    cfg.maneuver = {
        {2.0, 0.0, 0.0, 0.0, 0.0},
        {10.0, 4.0, 4.0, 0.0, 0.0},
        {10.0, 4.0, 1.0, 0.0, 0.0},
        {8.0, 1.0, 1.0, 0.0, 0.0},
    };
    out.emplace("hard-launch", std::move(cfg));
  }

  {
    SimConfig cfg;
    cfg.geom = geom;
    cfg.mu_true = 0.7;
    cfg.duration = 30.0;
    cfg.seed = 4;
    cfg.maneuver = {
        {6.0, 0.0, 3.0, 0.0, 0.0},
        {6.0, 3.0, 3.0, 0.0, 0.0},
        {1.0, 3.0, 3.0, delta_deep, delta_deep},
        {17.0, 3.0, 3.0, 0.0, 0.0},
    };
    out.emplace("step-steer", std::move(cfg));
  }

  {
    SimConfig cfg;
    cfg.geom = geom;
    cfg.duration = 60.0;
    cfg.seed = 5;
    cfg.surfaces = {
        {0.0, "tile", 0.68},
        {30.0, "cardboard", 1.02},
    };
    cfg.maneuver = {
        {6.0, 0.0, 3.0, 0.0, 0.0},
        {4.0, 3.0, 3.0, 0.0, 0.0},
        {3.5, 3.0, 3.0, 0.0, delta_boundary},
        {0.5, 3.0, 3.0, delta_boundary, delta_deep},
        {0.5, 3.0, 3.0, delta_deep, delta_deep},
        {0.3, 3.0, 3.0, delta_deep, 0.0},
        {17.2, 3.0, 3.0, 0.0, 0.0},
        {3.5, 3.0, 3.0, 0.0, delta_boundary},
        {0.5, 3.0, 3.0, delta_boundary, delta_deep},
        {0.5, 3.0, 3.0, delta_deep, delta_deep},
        {0.3, 3.0, 3.0, delta_deep, 0.0},
        {23.2, 3.0, 3.0, 0.0, 0.0},
    };
    out.emplace("two-surface", std::move(cfg));
  }

  return out;
}

}  // namespace slipkit
