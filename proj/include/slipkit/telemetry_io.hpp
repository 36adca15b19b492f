#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slipkit/core.hpp"

namespace slipkit {

inline constexpr double kDefaultSampleRate = 40.0;  // [Hz]

// Telemetry streams are line-oriented. JSON lines carry the keys
//   t, v, delta, ax, ay, vx, vy, wpsi          (required, numeric)
//   surface (string), slip (boolean)           (optional)
// and unknown keys are ignored so annotated streams stay loadable. CSV
// lines carry the same channels in that column order, with surface and
// slip as optional trailing columns; a leading "t,v,..." header row and
// '#' comment lines are skipped. An optional first JSON line containing
// the key "version" (and no "t") is a stream header.
struct LogHeader {
  int version = 1;
  double rate_hint = kDefaultSampleRate;            ///< nominal rate [Hz]
  std::map<std::string, std::string> units;         ///< channel -> declared unit
  std::optional<VehicleGeometry> geometry;
  std::map<std::string, std::string> metadata;      ///< free-form provenance
};

enum class HeaderValidation {
  strict,   ///< any defect is an error
  lenient,  ///< out-of-order records are dropped (last wins on duplicates)
};

struct LoadResult {
  std::vector<TelemetryRecord> records;
  LogHeader header;
  bool had_header = false;
  std::size_t dropped = 0;  ///< records discarded in lenient mode
};

/// Parses one record line, JSON or CSV, without unit conversion.
/// line_no appears in error messages (0 suppresses it).
TelemetryRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Loads a whole stream, applying any unit conversions the header declares
/// (delta in deg, wpsi in deg/s) and enforcing timestamp order.
LoadResult load_stream(std::istream& in, HeaderValidation mode,
                       const std::string& origin);
LoadResult load_stream(const std::string& path,
                       HeaderValidation mode = HeaderValidation::strict);

/// Writes records as JSON lines, preceded by a header line when given.
/// Output is byte-deterministic: shortest round-trip number formatting,
/// sorted header keys, no timestamps of its own.
void write_stream(std::ostream& out, std::span<const TelemetryRecord> records,
                  const LogHeader* header = nullptr);
void write_stream(const std::string& path, std::span<const TelemetryRecord> records,
                  const LogHeader* header = nullptr);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Writes content to path via a temp file plus rename, so readers never
/// observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

// Raw per-sensor series for rate alignment.
struct CommandSample {
  double t = 0.0;
  ControlAction u;
};

struct ImuSample {
  double t = 0.0;
  double a_x = 0.0;
  double a_y = 0.0;
};

struct OdometrySample {
  double t = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
  double w_psi = 0.0;
};

struct AlignResult {
  std::vector<TelemetryRecord> records;
  std::size_t slots = 0;    ///< clock ticks inside the common time range
  std::size_t dropped = 0;  ///< ticks that missed at least one channel
  std::map<std::string, std::size_t> missing;  ///< per-channel miss counts
};

/// Resamples the three channels onto a shared clock at target_rate. The
/// clock starts at the latest first timestamp and ends at the earliest
/// last one; each tick takes the nearest sample per channel within half a
/// period (ties to the earlier sample) and is dropped if any channel has
/// none. Aligning an already aligned stream is the identity.
AlignResult align_channels(std::span<const CommandSample> commands,
                           std::span<const ImuSample> imu,
                           std::span<const OdometrySample> odometry,
                           double target_rate = kDefaultSampleRate);

}  // namespace slipkit
