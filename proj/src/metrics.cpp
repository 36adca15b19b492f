#include "slipkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "slipkit/kernels.hpp"
#include "slipkit/telemetry_io.hpp"

namespace slipkit {

namespace {

SummaryStats to_summary(const kernels::MeanStd& ms) {
  SummaryStats s;
  s.mean = ms.mean;
  s.std = ms.std;
  s.n = ms.n;
  return s;
}

}  // namespace

EventMatchReport match_events(std::span<const SlipEvent> labeled,
                              std::span<const SlipEvent> detected, double window) {
  if (!std::isfinite(window) || window < 0.0) {
    throw InputDomainError("match window must be finite and nonnegative");
  }

  struct Candidate {
    double abs_delay;
    std::size_t li;
    std::size_t di;
  };
  std::vector<Candidate> candidates;
  for (std::size_t li = 0; li < labeled.size(); ++li) {
    for (std::size_t di = 0; di < detected.size(); ++di) {
      const double delay = detected[di].onset_t - labeled[li].onset_t;
      if (std::abs(delay) <= window) {
        candidates.push_back({std::abs(delay), li, di});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.abs_delay != b.abs_delay) return a.abs_delay < b.abs_delay;
    if (labeled[a.li].onset_t != labeled[b.li].onset_t) {
      return labeled[a.li].onset_t < labeled[b.li].onset_t;
    }
    if (detected[a.di].onset_t != detected[b.di].onset_t) {
      return detected[a.di].onset_t < detected[b.di].onset_t;
    }
    if (a.li != b.li) return a.li < b.li;
    return a.di < b.di;
  });

  std::vector<bool> labeled_used(labeled.size(), false);
  std::vector<bool> detected_used(detected.size(), false);
  EventMatchReport report;
  for (const Candidate& c : candidates) {
    if (labeled_used[c.li] || detected_used[c.di]) continue;
    labeled_used[c.li] = true;
    detected_used[c.di] = true;
    Match m;
    m.labeled = labeled[c.li];
    m.detected = detected[c.di];
    m.delay = detected[c.di].onset_t - labeled[c.li].onset_t;
    report.matches.push_back(std::move(m));
  }
  report.tp = report.matches.size();
  report.fp = detected.size() - report.tp;
  report.fn = labeled.size() - report.tp;
  return report;
}

PrfResult precision_recall_f1(const EventMatchReport& report) {
  PrfResult out;
  const double tp = static_cast<double>(report.tp);
  if (report.tp + report.fp > 0) {
    out.precision = tp / static_cast<double>(report.tp + report.fp);
  }
  if (report.tp + report.fn > 0) {
    out.recall = tp / static_cast<double>(report.tp + report.fn);
  }
  if (out.precision.has_value() && out.recall.has_value()) {
    const double p = *out.precision;
    const double r = *out.recall;
    out.f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
  }
  return out;
}

std::map<std::string, SummaryStats> delay_stats(const EventMatchReport& report) {
  std::map<std::string, std::vector<double>> groups;
  for (const Match& m : report.matches) {
    groups[m.labeled.surface.value_or(kDefaultSurface)].push_back(std::abs(m.delay));
  }
  std::map<std::string, SummaryStats> out;
  for (const auto& [surface, delays] : groups) {
    out.emplace(surface, to_summary(kernels::mean_std(delays)));
  }
  return out;
}

std::map<std::string, SummaryStats> mae_stats(
    std::span<const StreamEstimate> estimates,
    const std::map<std::string, double>& ground_truth) {
  std::map<std::string, std::vector<double>> errors;
  for (const StreamEstimate& e : estimates) {
    const auto it = ground_truth.find(e.surface);
    if (it == ground_truth.end()) {
      throw InputDomainError("no ground truth for surface '" + e.surface + "'");
    }
    errors[e.surface].push_back(std::abs(e.mu_hat - it->second));
  }
  std::map<std::string, SummaryStats> out;
  for (const auto& [surface, errs] : errors) {
    out.emplace(surface, to_summary(kernels::mean_std(errs)));
  }
  return out;
}

namespace {

// Plot coordinates snap to a 0.01 px grid so the emitted text is short and
// byte-stable.
std::string px(double v) { return format_double(std::round(v * 100.0) / 100.0); }

std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("unnamed") : out;
}

void svg_open(std::ostringstream& s, int w, int h) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
    << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
}

void svg_text(std::ostringstream& s, double x, double y, const std::string& text,
              const char* anchor = "start", int size = 12) {
  s << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-family=\"sans-serif\" font-size=\""
    << size << "\" text-anchor=\"" << anchor << "\" fill=\"#222222\">" << text << "</text>\n";
}

void svg_line(std::ostringstream& s, double x1, double y1, double x2, double y2,
              const char* color, const char* dash = nullptr) {
  s << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2) << "\" y2=\""
    << px(y2) << "\" stroke=\"" << color << "\" stroke-width=\"1\"";
  if (dash != nullptr) s << " stroke-dasharray=\"" << dash << "\"";
  s << "/>\n";
}

std::string circle_svg(const CircleExport& e) {
  std::ostringstream s;
  const int w = 480;
  const int h = 480;
  svg_open(s, w, h);
  svg_text(s, 16, 24, "acceleration envelope: " + e.surface, "start", 14);
  if (e.points.empty()) {
    svg_text(s, w / 2.0, h / 2.0, "no data", "middle", 16);
    s << "</svg>\n";
    return s.str();
  }
  double extent = 0.1;
  for (const CirclePoint& p : e.points) {
    extent = std::max({extent, std::abs(p.ax_g), std::abs(p.ay_g)});
  }
  if (e.estimate.valid()) extent = std::max(extent, e.estimate.mu_hat);
  extent *= 1.15;
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  const double scale = (w / 2.0 - 40.0) / extent;
  svg_line(s, 40, cy, w - 40, cy, "#bbbbbb");
  svg_line(s, cx, 40, cx, h - 40, "#bbbbbb");
  svg_text(s, w - 38, cy - 6, "ay/g", "start", 11);
  svg_text(s, cx + 6, 52, "ax/g", "start", 11);
  if (e.estimate.valid()) {
    s << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy) << "\" r=\""
      << px(e.estimate.mu_hat * scale)
      << "\" fill=\"none\" stroke=\"#222222\" stroke-dasharray=\"6 4\"/>\n";
    svg_text(s, 16, h - 16, "limit estimate " + format_double(e.estimate.mu_hat), "start", 12);
  } else {
    svg_text(s, 16, h - 16, "no valid limit estimate", "start", 12);
  }
  for (const CirclePoint& p : e.points) {
    // Lateral on the horizontal axis, longitudinal up.
    const double x = cx + p.ay_g * scale;
    const double y = cy - p.ax_g * scale;
    s << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"2\" fill=\""
      << (p.no_slip ? "#4477aa" : "#cc3311") << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string residual_svg(const ResidualTrace& trace) {
  std::ostringstream s;
  const int w = 640;
  const int h = 320;
  svg_open(s, w, h);
  svg_text(s, 16, 24, "command residuals: " + trace.stream_id, "start", 14);
  const std::size_t n = trace.t.size();
  if (n == 0 || trace.lin.size() != n || trace.ang.size() != n) {
    svg_text(s, w / 2.0, h / 2.0, "no data", "middle", 16);
    s << "</svg>\n";
    return s.str();
  }
  const double t0 = trace.t.front();
  const double t1 = trace.t.back();
  const double tspan = (t1 > t0) ? (t1 - t0) : 1.0;
  double ymax = std::max(trace.thresholds.delta_lin, trace.thresholds.delta_ang);
  for (std::size_t i = 0; i < n; ++i) {
    ymax = std::max({ymax, trace.lin[i], trace.ang[i]});
  }
  ymax *= 1.05;
  const double left = 48;
  const double right = w - 16;
  const double top = 40;
  const double bottom = h - 32;
  auto map_x = [&](double t) { return left + (t - t0) / tspan * (right - left); };
  auto map_y = [&](double v) { return bottom - v / ymax * (bottom - top); };
  svg_line(s, left, bottom, right, bottom, "#bbbbbb");
  svg_line(s, left, top, left, bottom, "#bbbbbb");
  svg_line(s, left, map_y(trace.thresholds.delta_lin), right,
           map_y(trace.thresholds.delta_lin), "#4477aa", "4 3");
  svg_line(s, left, map_y(trace.thresholds.delta_ang), right,
           map_y(trace.thresholds.delta_ang), "#ee7733", "4 3");
  for (int pass = 0; pass < 2; ++pass) {
    const std::vector<double>& series = (pass == 0) ? trace.lin : trace.ang;
    s << "<polyline fill=\"none\" stroke=\"" << ((pass == 0) ? "#4477aa" : "#ee7733")
      << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) s << ' ';
      s << px(map_x(trace.t[i])) << ',' << px(map_y(series[i]));
    }
    s << "\"/>\n";
  }
  svg_text(s, left + 4, top - 8, "speed residual (m/s)", "start", 11);
  svg_text(s, left + 180, top - 8, "yaw-rate residual (rad/s)", "start", 11);
  return s.str() + "</svg>\n";
}

std::string comparison_svg(std::span<const MuComparison> comparisons) {
  std::ostringstream s;
  const int w = 140 + static_cast<int>(comparisons.size()) * 120;
  const int h = 360;
  svg_open(s, w, h);
  svg_text(s, 16, 24, "friction estimates vs ground truth", "start", 14);
  double ymax = 0.1;
  for (const MuComparison& c : comparisons) {
    ymax = std::max(ymax, c.ground_truth);
    for (double v : c.estimates) ymax = std::max(ymax, v);
  }
  ymax *= 1.15;
  const double top = 48;
  const double bottom = h - 48;
  auto map_y = [&](double v) { return bottom - v / ymax * (bottom - top); };
  svg_line(s, 60, bottom, w - 20, bottom, "#bbbbbb");
  svg_line(s, 60, top, 60, bottom, "#bbbbbb");
  double x = 120;
  for (const MuComparison& c : comparisons) {
    svg_line(s, x - 32, map_y(c.ground_truth), x + 32, map_y(c.ground_truth), "#222222");
    svg_text(s, x, map_y(c.ground_truth) - 6, format_double(c.ground_truth), "middle", 10);
    for (double v : c.estimates) {
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << px(map_y(v))
        << "\" r=\"3\" fill=\"#4477aa\" fill-opacity=\"0.6\"/>\n";
    }
    svg_text(s, x, bottom + 18, c.surface, "middle", 11);
    x += 120;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::vector<std::string> emit_plots(const PlotInputs& inputs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir) / name).string();
    write_file_atomic(path, content);
    written.push_back(path);
  };

  for (const CircleExport& e : inputs.circles) {
    const std::string base = "friction_circle_" + sanitize(e.surface);
    emit(base + ".svg", circle_svg(e));
    std::ostringstream table;
    write_circle_export(table, e);
    emit(base + ".txt", table.str());
  }
  for (const ResidualTrace& trace : inputs.residuals) {
    const std::string base = "residuals_" + sanitize(trace.stream_id);
    emit(base + ".svg", residual_svg(trace));
    std::ostringstream table;
    table << "# stream " << trace.stream_id << "\n";
    table << "# thresholds " << format_double(trace.thresholds.delta_lin) << ' '
          << format_double(trace.thresholds.delta_ang) << "\n";
    const std::size_t n = std::min({trace.t.size(), trace.lin.size(), trace.ang.size()});
    for (std::size_t i = 0; i < n; ++i) {
      table << format_double(trace.t[i]) << ' ' << format_double(trace.lin[i]) << ' '
            << format_double(trace.ang[i]) << "\n";
    }
    emit(base + ".txt", table.str());
  }
  if (!inputs.comparisons.empty()) {
    emit("mu_comparison.svg", comparison_svg(inputs.comparisons));
    std::ostringstream table;
    table << "# surface ground_truth estimates...\n";
    for (const MuComparison& c : inputs.comparisons) {
      table << c.surface << ' ' << format_double(c.ground_truth);
      for (double v : c.estimates) table << ' ' << format_double(v);
      table << "\n";
    }
    emit("mu_comparison.txt", table.str());
  }
  return written;
}

}  // namespace slipkit
