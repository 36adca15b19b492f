#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slipkit/core.hpp"
#include "slipkit/detector.hpp"

namespace slipkit {

/// Surface key used for records that carry no surface tag.
inline constexpr const char* kDefaultSurface = "default";

/// Lower bound on the tire-road friction coefficient: the running maximum
/// of the acceleration traction ratio over samples the detector cleared.
/// Invalid (no estimate, not zero) until the first cleared sample arrives.
struct FrictionEstimate {
  double mu_hat = 0.0;
  double argmax_t = 0.0;     ///< timestamp of the sample attaining mu_hat
  double argmax_ax = 0.0;    ///< acceleration at that sample [m/s^2]
  double argmax_ay = 0.0;
  std::size_t n_samples = 0; ///< cleared samples consumed
  std::optional<std::string> surface;

  bool valid() const { return n_samples > 0; }
};

/// Folds one sample into the estimate. Samples flagged as slipping are
/// ignored; ties keep the earlier argmax.
FrictionEstimate update(FrictionEstimate est, const TelemetryRecord& rec,
                        const SlipFlags& flags, double g = kDefaultGravity);

/// One estimate per distinct surface tag in the stream; untagged records
/// fall under kDefaultSurface. Equals folding update() over each surface's
/// records in stream order, bit for bit.
std::map<std::string, FrictionEstimate> estimate_stream(
    std::span<const TelemetryRecord> stream, const Thresholds& th,
    const VehicleGeometry& geom, double g = kDefaultGravity);

/// One acceleration-plane point per record, in units of g.
struct CirclePoint {
  double t = 0.0;
  double ax_g = 0.0;
  double ay_g = 0.0;
  bool no_slip = true;
};

/// Everything a friction-circle plot needs: the point cloud for one surface
/// plus the limit estimate whose mu_hat is the circle radius.
struct CircleExport {
  std::string surface;
  std::vector<CirclePoint> points;
  FrictionEstimate estimate;
};

std::map<std::string, CircleExport> friction_circle_points(
    std::span<const TelemetryRecord> stream, const Thresholds& th,
    const VehicleGeometry& geom, double g = kDefaultGravity);

/// Plain-text export, one line per point: "point t ax_g ay_g cleared",
/// preceded by a surface line and followed by a summary line. Written and
/// parsed deterministically; see read_circle_export.
void write_circle_export(std::ostream& out, const CircleExport& e);
CircleExport read_circle_export(std::istream& in);

}  // namespace slipkit
