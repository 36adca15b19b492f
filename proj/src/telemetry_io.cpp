#include "slipkit/telemetry_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace slipkit {

namespace {

using nlohmann::json;

std::string at_line(std::size_t line_no) {
  return line_no == 0 ? std::string() : "line " + std::to_string(line_no) + ": ";
}

// Prefixes the origin while keeping the thrown type, so callers can still
// catch the specific error class.
[[noreturn]] void rethrow_tagged(const Error& e, const std::string& origin) {
  const std::string what = origin + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::input_domain: throw InputDomainError(what);
    case ErrorKind::undefined_slip: throw UndefinedSlipError(what);
    case ErrorKind::ordering: throw OrderingError(what);
    case ErrorKind::parse: throw ParseError(what);
    case ErrorKind::value: throw ValueError(what);
    case ErrorKind::io: throw IoError(what);
    case ErrorKind::alignment: throw AlignmentError(what);
    case ErrorKind::calibration: throw CalibrationError(what);
    case ErrorKind::fold: throw FoldError(what);
    case ErrorKind::labeling: throw LabelingError(what);
  }
  throw Error(e.kind(), what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double number_field(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(at_line(line_no) + "missing field '" + key + "'");
  }
  if (!it->is_number()) {
    throw ParseError(at_line(line_no) + "field '" + key + "' is not numeric");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ValueError(at_line(line_no) + "field '" + key + "' is not finite");
  }
  return v;
}

double csv_number(std::string_view text, const char* key, std::size_t line_no) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(at_line(line_no) + "field '" + key + "' is not numeric: '" +
                     std::string(t) + "'");
  }
  if (!std::isfinite(v)) {
    throw ValueError(at_line(line_no) + "field '" + key + "' is not finite");
  }
  return v;
}

void check_steering(double delta, std::size_t line_no) {
  if (!(std::abs(delta) < std::numbers::pi / 2)) {
    throw ValueError(at_line(line_no) + "field 'delta' out of range, |delta| < pi/2 required");
  }
}

TelemetryRecord parse_json_record(std::string_view line, std::size_t line_no) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError(at_line(line_no) + "malformed record");
  }
  TelemetryRecord r;
  r.t = number_field(j, "t", line_no);
  r.u.v = number_field(j, "v", line_no);
  r.u.delta = number_field(j, "delta", line_no);
  r.y.a_x_hat = number_field(j, "ax", line_no);
  r.y.a_y_hat = number_field(j, "ay", line_no);
  r.y.v_x_hat = number_field(j, "vx", line_no);
  r.y.v_y_hat = number_field(j, "vy", line_no);
  r.y.w_psi_hat = number_field(j, "wpsi", line_no);
  if (const auto it = j.find("surface"); it != j.end()) {
    if (!it->is_string()) {
      throw ParseError(at_line(line_no) + "field 'surface' is not a string");
    }
    r.surface = it->get<std::string>();
  }
  if (const auto it = j.find("slip"); it != j.end()) {
    if (!it->is_boolean()) {
      throw ParseError(at_line(line_no) + "field 'slip' is not a boolean");
    }
    r.slip_label = it->get<bool>();
  }
  return r;
}

TelemetryRecord parse_csv_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(',', pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  if (fields.size() < 8 || fields.size() > 10) {
    throw ParseError(at_line(line_no) + "expected 8 to 10 comma-separated fields, got " +
                     std::to_string(fields.size()));
  }
  TelemetryRecord r;
  r.t = csv_number(fields[0], "t", line_no);
  r.u.v = csv_number(fields[1], "v", line_no);
  r.u.delta = csv_number(fields[2], "delta", line_no);
  r.y.a_x_hat = csv_number(fields[3], "ax", line_no);
  r.y.a_y_hat = csv_number(fields[4], "ay", line_no);
  r.y.v_x_hat = csv_number(fields[5], "vx", line_no);
  r.y.v_y_hat = csv_number(fields[6], "vy", line_no);
  r.y.w_psi_hat = csv_number(fields[7], "wpsi", line_no);
  if (fields.size() >= 9) {
    const std::string_view s = trim(fields[8]);
    if (!s.empty()) r.surface = std::string(s);
  }
  if (fields.size() == 10) {
    const std::string_view s = trim(fields[9]);
    if (s == "true" || s == "1") {
      r.slip_label = true;
    } else if (s == "false" || s == "0") {
      r.slip_label = false;
    } else if (!s.empty()) {
      throw ParseError(at_line(line_no) + "field 'slip' must be true/false/1/0, got '" +
                       std::string(s) + "'");
    }
  }
  return r;
}

const std::map<std::string, std::vector<std::string>>& known_units() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"t", {"s"}},        {"v", {"m/s"}},       {"vx", {"m/s"}},
      {"vy", {"m/s"}},     {"ax", {"m/s^2"}},    {"ay", {"m/s^2"}},
      {"delta", {"rad", "deg"}},                 {"wpsi", {"rad/s", "deg/s"}},
  };
  return table;
}

LogHeader parse_header(const json& j, std::size_t line_no) {
  LogHeader h;
  const auto ver = j.find("version");
  if (!ver->is_number_integer() || ver->get<int>() != 1) {
    throw ParseError(at_line(line_no) + "unsupported stream version");
  }
  h.version = 1;
  if (const auto it = j.find("rate"); it != j.end()) {
    if (!it->is_number()) {
      throw ParseError(at_line(line_no) + "header field 'rate' is not numeric");
    }
    h.rate_hint = it->get<double>();
    if (!std::isfinite(h.rate_hint) || h.rate_hint <= 0.0) {
      throw ValueError(at_line(line_no) + "header field 'rate' must be positive");
    }
  }
  if (const auto it = j.find("units"); it != j.end()) {
    if (!it->is_object()) {
      throw ParseError(at_line(line_no) + "header field 'units' is not an object");
    }
    for (const auto& [channel, unit] : it->items()) {
      if (!unit.is_string()) {
        throw ParseError(at_line(line_no) + "unit for '" + channel + "' is not a string");
      }
      const auto known = known_units().find(channel);
      if (known == known_units().end()) {
        throw ParseError(at_line(line_no) + "units given for unknown channel '" + channel + "'");
      }
      const std::string u = unit.get<std::string>();
      if (std::find(known->second.begin(), known->second.end(), u) == known->second.end()) {
        throw ParseError(at_line(line_no) + "cannot convert unit '" + u + "' for channel '" +
                         channel + "'");
      }
      h.units[channel] = u;
    }
  }
  if (const auto it = j.find("geometry"); it != j.end()) {
    if (!it->is_object()) {
      throw ParseError(at_line(line_no) + "header field 'geometry' is not an object");
    }
    try {
      h.geometry = VehicleGeometry::make(
          number_field(*it, "l_f", line_no), number_field(*it, "l_r", line_no),
          number_field(*it, "r_e", line_no), number_field(*it, "m", line_no));
    } catch (const InputDomainError& e) {
      throw ValueError(at_line(line_no) + "bad header geometry: " + e.what());
    }
  }
  if (const auto it = j.find("meta"); it != j.end()) {
    if (!it->is_object()) {
      throw ParseError(at_line(line_no) + "header field 'meta' is not an object");
    }
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw ParseError(at_line(line_no) + "header meta value for '" + key +
                         "' is not a string");
      }
      h.metadata[key] = value.get<std::string>();
    }
  }
  return h;
}

}  // namespace

TelemetryRecord parse_record(std::string_view line, std::size_t line_no) {
  const std::string_view body = trim(line);
  if (body.empty()) {
    throw ParseError(at_line(line_no) + "empty record line");
  }
  TelemetryRecord r = (body.front() == '{') ? parse_json_record(body, line_no)
                                            : parse_csv_record(body, line_no);
  check_steering(r.u.delta, line_no);
  return r;
}

LoadResult load_stream(std::istream& in, HeaderValidation mode, const std::string& origin) {
  LoadResult out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_content = false;
  bool saw_csv_header = false;
  // Scales declared by the header; applied per record before the steering
  // range check so a degree-valued stream validates in its own unit.
  double delta_scale = 1.0;
  double wpsi_scale = 1.0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      if (body.front() == '{' && !saw_content) {
        const json j = json::parse(body, nullptr, false);
        if (!j.is_discarded() && j.is_object() && j.contains("version") && !j.contains("t")) {
          out.header = parse_header(j, line_no);
          out.had_header = true;
          saw_content = true;
          if (const auto it = out.header.units.find("delta");
              it != out.header.units.end() && it->second == "deg") {
            delta_scale = std::numbers::pi / 180.0;
            out.header.units["delta"] = "rad";
          }
          if (const auto it = out.header.units.find("wpsi");
              it != out.header.units.end() && it->second == "deg/s") {
            wpsi_scale = std::numbers::pi / 180.0;
            out.header.units["wpsi"] = "rad/s";
          }
          continue;
        }
      }
      if (body.front() != '{' && !saw_content && !saw_csv_header &&
          (body.rfind("t,", 0) == 0)) {
        saw_csv_header = true;
        continue;
      }
      saw_content = true;
      TelemetryRecord r = (body.front() == '{') ? parse_json_record(body, line_no)
                                                : parse_csv_record(body, line_no);
      r.u.delta *= delta_scale;
      r.y.w_psi_hat *= wpsi_scale;
      check_steering(r.u.delta, line_no);
      if (!out.records.empty() && !(r.t > out.records.back().t)) {
        if (mode == HeaderValidation::strict) {
          throw OrderingError(at_line(line_no) + "timestamp " + format_double(r.t) +
                              " does not increase after " +
                              format_double(out.records.back().t));
        }
        ++out.dropped;
        if (r.t == out.records.back().t) out.records.back() = std::move(r);
        continue;
      }
      out.records.push_back(std::move(r));
    }
  } catch (const Error& e) {
    rethrow_tagged(e, origin);
  }
  return out;
}

LoadResult load_stream(const std::string& path, HeaderValidation mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open input file '" + path + "'");
  }
  return load_stream(in, mode, path);
}

std::string format_double(double v) {
  // Shortest form "-0" would re-parse as the integer 0 and lose the sign
  // bit; spell negative zero so it survives a round trip.
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_stream(std::ostream& out, std::span<const TelemetryRecord> records,
                  const LogHeader* header) {
  if (header != nullptr) {
    json h;
    h["version"] = header->version;
    h["rate"] = header->rate_hint;
    if (!header->units.empty()) h["units"] = header->units;
    if (header->geometry.has_value()) {
      h["geometry"] = {{"l_f", header->geometry->l_f},
                       {"l_r", header->geometry->l_r},
                       {"r_e", header->geometry->r_e},
                       {"m", header->geometry->m}};
    }
    if (!header->metadata.empty()) h["meta"] = header->metadata;
    out << h.dump() << "\n";
  }
  for (const TelemetryRecord& r : records) {
    out << "{\"t\":" << format_double(r.t) << ",\"v\":" << format_double(r.u.v)
        << ",\"delta\":" << format_double(r.u.delta)
        << ",\"ax\":" << format_double(r.y.a_x_hat)
        << ",\"ay\":" << format_double(r.y.a_y_hat)
        << ",\"vx\":" << format_double(r.y.v_x_hat)
        << ",\"vy\":" << format_double(r.y.v_y_hat)
        << ",\"wpsi\":" << format_double(r.y.w_psi_hat);
    if (r.surface.has_value()) {
      out << ",\"surface\":" << json(*r.surface).dump();
    }
    if (r.slip_label.has_value()) {
      out << ",\"slip\":" << (*r.slip_label ? "true" : "false");
    }
    out << "}\n";
  }
}

void write_stream(const std::string& path, std::span<const TelemetryRecord> records,
                  const LogHeader* header) {
  std::ostringstream buf;
  write_stream(buf, records, header);
  write_file_atomic(path, buf.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open output file '" + tmp + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("failed to move '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

namespace {

template <typename Sample>
void check_channel(std::span<const Sample> channel, const char* name) {
  if (channel.empty()) {
    throw AlignmentError(std::string("channel '") + name + "' is empty");
  }
  for (std::size_t i = 0; i < channel.size(); ++i) {
    if (!std::isfinite(channel[i].t)) {
      throw AlignmentError(std::string("channel '") + name + "' sample " +
                           std::to_string(i) + " has a non-finite timestamp");
    }
    if (i > 0 && !(channel[i].t > channel[i - 1].t)) {
      throw AlignmentError(std::string("channel '") + name + "' sample " +
                           std::to_string(i) + " is out of order");
    }
  }
}

// Nearest sample to t, preferring the earlier one on exact ties. cursor
// only moves forward; tick times are nondecreasing across calls.
template <typename Sample>
const Sample* nearest(std::span<const Sample> channel, std::size_t& cursor, double t,
                      double half_period) {
  while (cursor + 1 < channel.size() &&
         std::abs(channel[cursor + 1].t - t) < std::abs(channel[cursor].t - t)) {
    ++cursor;
  }
  if (std::abs(channel[cursor].t - t) <= half_period) return &channel[cursor];
  return nullptr;
}

}  // namespace

AlignResult align_channels(std::span<const CommandSample> commands,
                           std::span<const ImuSample> imu,
                           std::span<const OdometrySample> odometry,
                           double target_rate) {
  if (!std::isfinite(target_rate) || target_rate <= 0.0) {
    throw InputDomainError("target_rate must be finite and positive");
  }
  check_channel(commands, "commands");
  check_channel(imu, "imu");
  check_channel(odometry, "odometry");

  const double dt = 1.0 / target_rate;
  // Tolerate rounding at the exact half-period boundary.
  const double half = (dt / 2.0) * (1.0 + 1e-9);
  const double t0 = std::max({commands.front().t, imu.front().t, odometry.front().t});
  const double t1 = std::min({commands.back().t, imu.back().t, odometry.back().t});

  AlignResult out;
  out.missing = {{"commands", 0}, {"imu", 0}, {"odometry", 0}};
  if (t0 > t1) return out;

  const std::size_t slots =
      static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  out.slots = slots;

  std::size_t ci = 0;
  std::size_t ii = 0;
  std::size_t oi = 0;
  for (std::size_t k = 0; k < slots; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const CommandSample* c = nearest(commands, ci, t, half);
    const ImuSample* m = nearest(imu, ii, t, half);
    const OdometrySample* o = nearest(odometry, oi, t, half);
    if (c == nullptr) ++out.missing["commands"];
    if (m == nullptr) ++out.missing["imu"];
    if (o == nullptr) ++out.missing["odometry"];
    if (c == nullptr || m == nullptr || o == nullptr) {
      ++out.dropped;
      continue;
    }
    TelemetryRecord r;
    r.t = t;
    r.u = c->u;
    r.y.a_x_hat = m->a_x;
    r.y.a_y_hat = m->a_y;
    r.y.v_x_hat = o->v_x;
    r.y.v_y_hat = o->v_y;
    r.y.w_psi_hat = o->w_psi;
    out.records.push_back(r);
  }
  return out;
}

}  // namespace slipkit
