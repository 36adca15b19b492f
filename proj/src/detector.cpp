#include "slipkit/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slipkit {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InputDomainError(std::string(name) + " is not finite");
  }
}

void check_ordering(std::span<const TelemetryRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i].t > records[i - 1].t)) {
      throw OrderingError("record " + std::to_string(i) + ": timestamp " +
                          std::to_string(records[i].t) + " does not increase after " +
                          std::to_string(records[i - 1].t));
    }
  }
}

void check_event_config(const EventConfig& cfg) {
  if (!std::isfinite(cfg.refractory) || cfg.refractory < 0.0) {
    throw InputDomainError("refractory must be finite and nonnegative");
  }
  if (cfg.min_consecutive < 1) {
    throw InputDomainError("min_consecutive must be at least 1");
  }
}

}  // namespace

Thresholds Thresholds::make(double delta_lin, double delta_ang) {
  if (!std::isfinite(delta_lin) || delta_lin <= 0.0) {
    throw InputDomainError("delta_lin must be finite and positive");
  }
  if (!std::isfinite(delta_ang) || delta_ang <= 0.0) {
    throw InputDomainError("delta_ang must be finite and positive");
  }
  return Thresholds{delta_lin, delta_ang};
}

const char* to_string(SlipKind kind) {
  switch (kind) {
    case SlipKind::linear:
      return "linear";
    case SlipKind::angular:
      return "angular";
    default:
      return "both";
  }
}

double linear_residual(const ControlAction& u, const Observation& y) {
  require_finite(u.v, "v");
  require_finite(y.v_x_hat, "v_x_hat");
  return std::abs(u.v - y.v_x_hat);
}

double angular_residual(const ControlAction& u, const Observation& y,
                        const VehicleGeometry& geom) {
  require_finite(y.w_psi_hat, "w_psi_hat");
  return std::abs(expected_yaw_rate(u, geom) - y.w_psi_hat);
}

SlipFlags detect_step(const TelemetryRecord& rec, const Thresholds& th,
                      const VehicleGeometry& geom) {
  if (!(th.delta_lin > 0.0) || !(th.delta_ang > 0.0)) {
    throw InputDomainError("thresholds must be positive");
  }
  SlipFlags f;
  f.d_lin = linear_residual(rec.u, rec.y) >= th.delta_lin;
  f.d_ang = angular_residual(rec.u, rec.y, geom) >= th.delta_ang;
  f.no_slip = !f.d_lin && !f.d_ang;
  return f;
}

std::vector<SlipEvent> extract_events(std::span<const TelemetryRecord> records,
                                      std::span<const SlipFlags> flags,
                                      const VehicleGeometry& geom,
                                      const EventConfig& cfg) {
  if (records.size() != flags.size()) {
    throw InputDomainError("records and flags must have the same length");
  }
  check_ordering(records);
  check_event_config(cfg);

  std::vector<SlipEvent> out;
  bool open = false;
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t prev_idx = 0;
  double prev_t = 0.0;
  double peak_lin = 0.0;
  double peak_ang = 0.0;
  bool any_lin = false;
  bool any_ang = false;
  int run = 0;
  int best_run = 0;

  auto finalize = [&]() {
    if (!open) return;
    open = false;
    if (best_run < cfg.min_consecutive) return;
    SlipEvent e;
    e.onset_t = records[first].t;
    e.end_t = records[last].t;
    e.kind = (any_lin && any_ang) ? SlipKind::both
                                  : (any_lin ? SlipKind::linear : SlipKind::angular);
    e.peak_residual = std::max(peak_lin, peak_ang);
    e.surface = records[first].surface;
    out.push_back(e);
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(flags[i].d_lin || flags[i].d_ang)) continue;
    if (open && records[i].t - prev_t <= cfg.refractory) {
      run = (i == prev_idx + 1) ? run + 1 : 1;
    } else {
      finalize();
      open = true;
      first = i;
      peak_lin = peak_ang = 0.0;
      any_lin = any_ang = false;
      run = 1;
      best_run = 0;
    }
    best_run = std::max(best_run, run);
    if (flags[i].d_lin) {
      any_lin = true;
      peak_lin = std::max(peak_lin, linear_residual(records[i].u, records[i].y));
    }
    if (flags[i].d_ang) {
      any_ang = true;
      peak_ang = std::max(peak_ang, angular_residual(records[i].u, records[i].y, geom));
    }
    last = i;
    prev_idx = i;
    prev_t = records[i].t;
  }
  finalize();
  return out;
}

std::vector<SlipEvent> labeled_events(std::span<const TelemetryRecord> records,
                                      const EventConfig& cfg) {
  check_ordering(records);
  check_event_config(cfg);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].slip_label.has_value()) {
      throw LabelingError("record " + std::to_string(i) + " has no slip label");
    }
  }

  std::vector<SlipEvent> out;
  bool open = false;
  std::size_t first = 0;
  std::size_t last = 0;
  double prev_t = 0.0;

  auto finalize = [&]() {
    if (!open) return;
    open = false;
    SlipEvent e;
    e.onset_t = records[first].t;
    e.end_t = records[last].t;
    e.kind = SlipKind::both;
    e.peak_residual = 0.0;
    e.surface = records[first].surface;
    out.push_back(e);
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!*records[i].slip_label) continue;
    if (!(open && records[i].t - prev_t <= cfg.refractory)) {
      finalize();
      open = true;
      first = i;
    }
    last = i;
    prev_t = records[i].t;
  }
  finalize();
  return out;
}

std::vector<TelemetryRecord> smooth_observations(
    std::span<const TelemetryRecord> records, int window) {
  if (window < 0) {
    throw InputDomainError("smoothing window must be nonnegative");
  }
  std::vector<TelemetryRecord> out(records.begin(), records.end());
  if (window <= 1) return out;
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t begin = (i + 1 >= w) ? i + 1 - w : 0;
    double sum_v = 0.0;
    double sum_w = 0.0;
    for (std::size_t j = begin; j <= i; ++j) {
      sum_v += records[j].y.v_x_hat;
      sum_w += records[j].y.w_psi_hat;
    }
    const double n = static_cast<double>(i - begin + 1);
    out[i].y.v_x_hat = sum_v / n;
    out[i].y.w_psi_hat = sum_w / n;
  }
  return out;
}

}  // namespace slipkit
