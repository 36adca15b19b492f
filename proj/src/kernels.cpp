#include "slipkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace slipkit::kernels {

namespace {

// Kernel loop bodies must not throw, so inputs are checked up front.
void prevalidate(std::span<const TelemetryRecord> records, const VehicleGeometry& geom) {
  if (!(geom.l_w > 0.0) || !std::isfinite(geom.l_w)) {
    throw InputDomainError("l_w must be finite and positive");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TelemetryRecord& r = records[i];
    const bool finite = std::isfinite(r.u.v) && std::isfinite(r.u.delta) &&
                        std::isfinite(r.y.v_x_hat) && std::isfinite(r.y.w_psi_hat) &&
                        std::isfinite(r.y.a_x_hat) && std::isfinite(r.y.a_y_hat);
    if (!finite) {
      throw InputDomainError("record " + std::to_string(i) + " has a non-finite field");
    }
    if (!(std::abs(r.u.delta) < std::numbers::pi / 2)) {
      throw InputDomainError("record " + std::to_string(i) +
                             ": delta must satisfy |delta| < pi/2");
    }
  }
}

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

ResidualBatch compute_residuals_serial(std::span<const TelemetryRecord> records,
                                       const VehicleGeometry& geom) {
  prevalidate(records, geom);
  ResidualBatch out;
  out.lin.resize(records.size());
  out.ang.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.lin[i] = linear_residual(records[i].u, records[i].y);
    out.ang[i] = angular_residual(records[i].u, records[i].y, geom);
  }
  return out;
}

ResidualBatch compute_residuals(std::span<const TelemetryRecord> records,
                                const VehicleGeometry& geom) {
  prevalidate(records, geom);
  ResidualBatch out;
  out.lin.resize(records.size());
  out.ang.resize(records.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.lin[i] = linear_residual(records[i].u, records[i].y);
    out.ang[i] = angular_residual(records[i].u, records[i].y, geom);
  }
  return out;
}

std::vector<SlipFlags> detect_flags_serial(std::span<const TelemetryRecord> records,
                                           const Thresholds& th,
                                           const VehicleGeometry& geom) {
  if (!(th.delta_lin > 0.0) || !(th.delta_ang > 0.0)) {
    throw InputDomainError("thresholds must be positive");
  }
  prevalidate(records, geom);
  std::vector<SlipFlags> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i] = detect_step(records[i], th, geom);
  }
  return out;
}

std::vector<SlipFlags> detect_flags(std::span<const TelemetryRecord> records,
                                    const Thresholds& th, const VehicleGeometry& geom) {
  if (!(th.delta_lin > 0.0) || !(th.delta_ang > 0.0)) {
    throw InputDomainError("thresholds must be positive");
  }
  prevalidate(records, geom);
  std::vector<SlipFlags> out(records.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = detect_step(records[i], th, geom);
  }
  return out;
}

std::vector<double> traction_batch_serial(std::span<const TelemetryRecord> records,
                                          double g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw InputDomainError("g must be finite and positive");
  }
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i] = traction_from_accel(records[i].y, g);
  }
  return out;
}

std::vector<double> traction_batch(std::span<const TelemetryRecord> records, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw InputDomainError("g must be finite and positive");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!std::isfinite(records[i].y.a_x_hat) || !std::isfinite(records[i].y.a_y_hat)) {
      throw InputDomainError("record " + std::to_string(i) + " has a non-finite field");
    }
  }
  std::vector<double> out(records.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = std::hypot(records[i].y.a_x_hat, records[i].y.a_y_hat) / g;
  }
  return out;
}

MeanStd mean_std_serial(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  double sq = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    sq += d * d;
  }
  out.std = std::sqrt(sq / static_cast<double>(out.n));
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (out.n == 0) return out;
  const std::size_t nb = block_count(out.n);
  std::vector<double> partial(nb, 0.0);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(begin + kBlock, values.size());
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    partial[b] = s;
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  out.mean = sum / static_cast<double>(out.n);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(begin + kBlock, values.size());
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = values[i] - out.mean;
      s += d * d;
    }
    partial[b] = s;
  }
  double sq = 0.0;
  for (double p : partial) sq += p;
  out.std = std::sqrt(sq / static_cast<double>(out.n));
  return out;
}

MaxIndex no_slip_max_serial(std::span<const double> values,
                            std::span<const SlipFlags> flags) {
  if (values.size() != flags.size()) {
    throw InputDomainError("values and flags must have the same length");
  }
  MaxIndex out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!flags[i].no_slip) continue;
    ++out.n;
    if (!out.valid || values[i] > out.value) {
      out.valid = true;
      out.value = values[i];
      out.index = i;
    }
  }
  return out;
}

MaxIndex no_slip_max(std::span<const double> values, std::span<const SlipFlags> flags) {
  if (values.size() != flags.size()) {
    throw InputDomainError("values and flags must have the same length");
  }
  const std::size_t nb = block_count(values.size());
  std::vector<MaxIndex> partial(nb);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(begin + kBlock, values.size());
    MaxIndex local;
    for (std::size_t i = begin; i < end; ++i) {
      if (!flags[i].no_slip) continue;
      ++local.n;
      if (!local.valid || values[i] > local.value) {
        local.valid = true;
        local.value = values[i];
        local.index = i;
      }
    }
    partial[b] = local;
  }
  MaxIndex out;
  for (const MaxIndex& p : partial) {
    out.n += p.n;
    if (!p.valid) continue;
    // Blocks are visited in index order, so strict > keeps the first index
    // on ties, matching the serial scan exactly.
    if (!out.valid || p.value > out.value) {
      out.valid = true;
      out.value = p.value;
      out.index = p.index;
    }
  }
  return out;
}

}  // namespace slipkit::kernels
