#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slipkit/core.hpp"
#include "slipkit/detector.hpp"

namespace slipkit::kernels {

// Batch kernels used by calibration and estimation. Each kernel has an
// OpenMP variant and a _serial reference. Parallel reductions accumulate
// fixed 4096-element blocks and combine the partials serially in block
// order, so every result is independent of the thread count. Element maps
// (residuals, flags, traction) are embarrassingly parallel and bit-equal to
// the serial reference; blocked mean/std agrees with the two-pass serial
// reference to 1e-9 relative. Max selection breaks ties toward the lowest
// index and is exactly serial-equivalent.

inline constexpr std::size_t kBlock = 4096;

struct ResidualBatch {
  std::vector<double> lin;
  std::vector<double> ang;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
};

struct MaxIndex {
  bool valid = false;
  double value = 0.0;
  std::size_t index = 0;  // lowest index attaining value
  std::size_t n = 0;      // indices that qualified for the reduction
};

ResidualBatch compute_residuals(std::span<const TelemetryRecord> records,
                                const VehicleGeometry& geom);
ResidualBatch compute_residuals_serial(std::span<const TelemetryRecord> records,
                                       const VehicleGeometry& geom);

std::vector<SlipFlags> detect_flags(std::span<const TelemetryRecord> records,
                                    const Thresholds& th, const VehicleGeometry& geom);
std::vector<SlipFlags> detect_flags_serial(std::span<const TelemetryRecord> records,
                                           const Thresholds& th,
                                           const VehicleGeometry& geom);

std::vector<double> traction_batch(std::span<const TelemetryRecord> records, double g);
std::vector<double> traction_batch_serial(std::span<const TelemetryRecord> records,
                                          double g);

MeanStd mean_std(std::span<const double> values);
MeanStd mean_std_serial(std::span<const double> values);

/// Max of values[i] over indices where flags[i].no_slip; n counts the
/// qualifying indices. valid is false when no index qualifies.
MaxIndex no_slip_max(std::span<const double> values, std::span<const SlipFlags> flags);
MaxIndex no_slip_max_serial(std::span<const double> values,
                            std::span<const SlipFlags> flags);

}  // namespace slipkit::kernels
