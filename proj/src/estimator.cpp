#include "slipkit/estimator.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "slipkit/kernels.hpp"
#include "slipkit/telemetry_io.hpp"

namespace slipkit {

namespace {

void check_ordering(std::span<const TelemetryRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i].t > records[i - 1].t)) {
      throw OrderingError("record " + std::to_string(i) + ": timestamp " +
                          std::to_string(records[i].t) + " does not increase after " +
                          std::to_string(records[i - 1].t));
    }
  }
}

double parse_field(std::string_view text, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("circle export: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace

FrictionEstimate update(FrictionEstimate est, const TelemetryRecord& rec,
                        const SlipFlags& flags, double g) {
  if (!flags.no_slip) return est;
  const double rho = traction_from_accel(rec.y, g);
  FrictionEstimate next = est;
  if (!est.valid() || rho > est.mu_hat) {
    next.mu_hat = rho;
    next.argmax_t = rec.t;
    next.argmax_ax = rec.y.a_x_hat;
    next.argmax_ay = rec.y.a_y_hat;
  }
  next.n_samples = est.n_samples + 1;
  return next;
}

std::map<std::string, FrictionEstimate> estimate_stream(
    std::span<const TelemetryRecord> stream, const Thresholds& th,
    const VehicleGeometry& geom, double g) {
  check_ordering(stream);
  const std::vector<SlipFlags> flags = kernels::detect_flags(stream, th, geom);
  const std::vector<double> rho = kernels::traction_batch(stream, g);

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    groups[stream[i].surface.value_or(kDefaultSurface)].push_back(i);
  }

  std::map<std::string, FrictionEstimate> out;
  for (const auto& [surface, idxs] : groups) {
    std::vector<double> values(idxs.size());
    std::vector<SlipFlags> group_flags(idxs.size());
    for (std::size_t j = 0; j < idxs.size(); ++j) {
      values[j] = rho[idxs[j]];
      group_flags[j] = flags[idxs[j]];
    }
    const kernels::MaxIndex best = kernels::no_slip_max(values, group_flags);
    FrictionEstimate est;
    est.surface = surface;
    est.n_samples = best.n;
    if (best.valid) {
      const std::size_t i = idxs[best.index];
      est.mu_hat = best.value;
      est.argmax_t = stream[i].t;
      est.argmax_ax = stream[i].y.a_x_hat;
      est.argmax_ay = stream[i].y.a_y_hat;
    }
    out.emplace(surface, est);
  }
  return out;
}

std::map<std::string, CircleExport> friction_circle_points(
    std::span<const TelemetryRecord> stream, const Thresholds& th,
    const VehicleGeometry& geom, double g) {
  std::map<std::string, FrictionEstimate> estimates = estimate_stream(stream, th, geom, g);
  const std::vector<SlipFlags> flags = kernels::detect_flags(stream, th, geom);

  std::map<std::string, CircleExport> out;
  for (auto& [surface, est] : estimates) {
    CircleExport e;
    e.surface = surface;
    e.estimate = est;
    out.emplace(surface, std::move(e));
  }
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::string key = stream[i].surface.value_or(kDefaultSurface);
    CirclePoint p;
    p.t = stream[i].t;
    p.ax_g = stream[i].y.a_x_hat / g;
    p.ay_g = stream[i].y.a_y_hat / g;
    p.no_slip = flags[i].no_slip;
    out[key].points.push_back(p);
  }
  return out;
}

void write_circle_export(std::ostream& out, const CircleExport& e) {
  out << "surface " << e.surface << "\n";
  for (const CirclePoint& p : e.points) {
    out << "point " << format_double(p.t) << ' ' << format_double(p.ax_g) << ' '
        << format_double(p.ay_g) << ' ' << (p.no_slip ? 1 : 0) << "\n";
  }
  const FrictionEstimate& est = e.estimate;
  out << "summary " << (est.valid() ? 1 : 0) << ' ' << format_double(est.mu_hat) << ' '
      << format_double(est.argmax_t) << ' ' << format_double(est.argmax_ax) << ' '
      << format_double(est.argmax_ay) << ' ' << est.n_samples << "\n";
}

CircleExport read_circle_export(std::istream& in) {
  CircleExport e;
  std::string line;
  if (!std::getline(in, line) || line.rfind("surface ", 0) != 0) {
    throw ParseError("circle export: missing surface line");
  }
  e.surface = line.substr(8);
  bool have_summary = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("point ", 0) == 0) {
      const auto fields = split_fields(std::string_view(line).substr(6));
      if (fields.size() != 4) {
        throw ParseError("circle export: point line needs 4 fields");
      }
      CirclePoint p;
      p.t = parse_field(fields[0], "t");
      p.ax_g = parse_field(fields[1], "ax_g");
      p.ay_g = parse_field(fields[2], "ay_g");
      p.no_slip = parse_field(fields[3], "cleared flag") != 0.0;
      e.points.push_back(p);
    } else if (line.rfind("summary ", 0) == 0) {
      const auto fields = split_fields(std::string_view(line).substr(8));
      if (fields.size() != 6) {
        throw ParseError("circle export: summary line needs 6 fields");
      }
      const bool valid = parse_field(fields[0], "valid flag") != 0.0;
      e.estimate.mu_hat = parse_field(fields[1], "mu_hat");
      e.estimate.argmax_t = parse_field(fields[2], "argmax_t");
      e.estimate.argmax_ax = parse_field(fields[3], "argmax_ax");
      e.estimate.argmax_ay = parse_field(fields[4], "argmax_ay");
      e.estimate.n_samples = static_cast<std::size_t>(parse_field(fields[5], "n_samples"));
      if (valid != (e.estimate.n_samples > 0)) {
        throw ParseError("circle export: summary valid flag disagrees with sample count");
      }
      e.estimate.surface = e.surface;
      have_summary = true;
      break;
    } else {
      throw ParseError("circle export: unrecognized line '" + line + "'");
    }
  }
  if (!have_summary) {
    throw ParseError("circle export: missing summary line");
  }
  return e;
}

}  // namespace slipkit
