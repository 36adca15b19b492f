#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "slipkit/metrics.hpp"
#include "test_util.hpp"

using namespace slipkit;

namespace {

SlipEvent event_at(double onset, double end = -1.0) {
  SlipEvent e;
  e.onset_t = onset;
  e.end_t = (end < 0.0) ? onset + 0.1 : end;
  e.kind = SlipKind::linear;
  e.peak_residual = 1.0;
  return e;
}

}  // namespace

TEST_CASE("matching pairs events inside the window and counts the rest") {
  const std::vector<SlipEvent> labeled = {event_at(1.0), event_at(5.0)};
  const std::vector<SlipEvent> detected = {event_at(1.2), event_at(30.0)};
  const auto report = match_events(labeled, detected, 1.0);
  REQUIRE(report.tp == 1);
  CHECK(report.fp == 1);
  CHECK(report.fn == 1);
  CHECK(report.matches[0].labeled.onset_t == 1.0);
  CHECK(report.matches[0].detected.onset_t == 1.2);
  CHECK(report.matches[0].delay == 1.2 - 1.0);

  const auto prf = precision_recall_f1(report);
  REQUIRE(prf.precision.has_value());
  REQUIRE(prf.recall.has_value());
  REQUIRE(prf.f1.has_value());
  CHECK(*prf.precision == 0.5);
  CHECK(*prf.recall == 0.5);
  CHECK(*prf.f1 == 0.5);
}

TEST_CASE("closest pairs are claimed first") {
  const std::vector<SlipEvent> labeled = {event_at(0.0), event_at(1.0)};
  const std::vector<SlipEvent> detected = {event_at(0.4), event_at(1.05)};
  const auto report = match_events(labeled, detected);
  REQUIRE(report.tp == 2);
  CHECK(report.fp == 0);
  CHECK(report.fn == 0);
  // The (1.0, 1.05) pair has the smallest |delay| so it is taken first.
  CHECK(report.matches[0].labeled.onset_t == 1.0);
  CHECK(report.matches[0].delay == 1.05 - 1.0);
  CHECK(report.matches[1].labeled.onset_t == 0.0);
  CHECK(report.matches[1].delay == 0.4);
}

TEST_CASE("greedy matching is deterministic, not assignment-optimal") {
  // An optimal pairing would claim both labels; the documented greedy rule
  // takes (0.0, 0.05) first, which strands the remaining cross pair.
  const std::vector<SlipEvent> labeled = {event_at(0.0), event_at(0.2)};
  const std::vector<SlipEvent> detected = {event_at(0.05), event_at(-0.2)};
  const auto report = match_events(labeled, detected, 0.25);
  CHECK(report.tp == 1);
  CHECK(report.fp == 1);
  CHECK(report.fn == 1);
  CHECK(report.matches[0].labeled.onset_t == 0.0);
  CHECK(report.matches[0].detected.onset_t == 0.05);
}

TEST_CASE("each event matches at most once") {
  const std::vector<SlipEvent> labeled = {event_at(0.0)};
  const std::vector<SlipEvent> detected = {event_at(0.1), event_at(0.2), event_at(0.3)};
  const auto report = match_events(labeled, detected);
  CHECK(report.tp == 1);
  CHECK(report.fp == 2);
  CHECK(report.fn == 0);
  const auto prf = precision_recall_f1(report);
  CHECK(*prf.precision == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(*prf.recall == 1.0);
}

TEST_CASE("the window boundary is inclusive and ties prefer earlier labels") {
  const std::vector<SlipEvent> one_label = {event_at(0.0)};
  CHECK(match_events(one_label, std::vector<SlipEvent>{event_at(1.0)}, 1.0).tp == 1);
  CHECK(match_events(one_label, std::vector<SlipEvent>{event_at(-1.0)}, 1.0).tp == 1);
  CHECK(match_events(one_label, std::vector<SlipEvent>{event_at(1.1)}, 1.0).tp == 0);

  const std::vector<SlipEvent> labeled = {event_at(0.0), event_at(2.0)};
  const std::vector<SlipEvent> detected = {event_at(1.0)};
  const auto report = match_events(labeled, detected, 1.0);
  REQUIRE(report.tp == 1);
  CHECK(report.matches[0].labeled.onset_t == 0.0);
  CHECK(report.fn == 1);

  CHECK_THROWS_AS(match_events(labeled, detected, -0.5), InputDomainError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(match_events(labeled, detected, nan), InputDomainError);
}

TEST_CASE("precision, recall and f1 go null when undefined") {
  EventMatchReport empty;
  const auto none = precision_recall_f1(empty);
  CHECK_FALSE(none.precision.has_value());
  CHECK_FALSE(none.recall.has_value());
  CHECK_FALSE(none.f1.has_value());

  EventMatchReport misses;
  misses.fn = 3;
  const auto no_detections = precision_recall_f1(misses);
  CHECK_FALSE(no_detections.precision.has_value());
  REQUIRE(no_detections.recall.has_value());
  CHECK(*no_detections.recall == 0.0);
  CHECK_FALSE(no_detections.f1.has_value());

  EventMatchReport all_wrong;
  all_wrong.fp = 2;
  all_wrong.fn = 3;
  const auto zeros = precision_recall_f1(all_wrong);
  CHECK(*zeros.precision == 0.0);
  CHECK(*zeros.recall == 0.0);
  REQUIRE(zeros.f1.has_value());
  CHECK(*zeros.f1 == 0.0);
}

TEST_CASE("a 20/2/0 confusion rounds to the familiar summary figures") {
  EventMatchReport report;
  report.tp = 20;
  report.fp = 2;
  report.fn = 0;
  const auto prf = precision_recall_f1(report);
  auto rounded = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  CHECK(rounded(*prf.precision) == 0.909);
  CHECK(rounded(*prf.recall) == 1.0);
  CHECK(rounded(*prf.f1) == 0.952);
}

TEST_CASE("delay statistics use absolute delays grouped by surface") {
  EventMatchReport report;
  auto add_match = [&report](double labeled_onset, double delay,
                             std::optional<std::string> surface) {
    Match m;
    m.labeled = event_at(labeled_onset);
    m.labeled.surface = std::move(surface);
    m.detected = event_at(labeled_onset + delay);
    m.delay = delay;
    report.matches.push_back(std::move(m));
  };
  add_match(1.0, 0.1, std::nullopt);
  add_match(5.0, -0.3, std::nullopt);
  add_match(9.0, 0.25, "ice");
  report.tp = report.matches.size();

  const auto stats = delay_stats(report);
  REQUIRE(stats.size() == 2);
  REQUIRE(stats.count(kDefaultSurface) == 1);
  REQUIRE(stats.count("ice") == 1);

  const SummaryStats& untagged = stats.at(kDefaultSurface);
  CHECK(untagged.n == 2);
  CHECK(untagged.mean == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(untagged.std == doctest::Approx(0.1).epsilon(1e-12));

  const SummaryStats& ice = stats.at("ice");
  CHECK(ice.n == 1);
  CHECK(ice.mean == 0.25);
  CHECK(ice.std == 0.0);

  CHECK(delay_stats(EventMatchReport{}).empty());
}

TEST_CASE("estimate accuracy scores against per-surface ground truth") {
  const std::vector<StreamEstimate> estimates = {
      {"run-1", "tile", 0.65},
      {"run-2", "tile", 0.71},
      {"run-3", "cardboard", 1.0},
  };
  const std::map<std::string, double> truth = {{"tile", 0.68}, {"cardboard", 1.02}};

  const auto stats = mae_stats(estimates, truth);
  REQUIRE(stats.size() == 2);
  CHECK(stats.at("tile").n == 2);
  CHECK(stats.at("tile").mean == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(stats.at("cardboard").n == 1);
  CHECK(stats.at("cardboard").mean == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(stats.at("cardboard").std == 0.0);

  const std::vector<StreamEstimate> orphan = {{"run-9", "mud", 0.4}};
  CHECK_THROWS_WITH_AS(mae_stats(orphan, truth), doctest::Contains("mud"),
                       InputDomainError);
}

namespace {

PlotInputs sample_plot_inputs() {
  PlotInputs inputs;

  CircleExport circle;
  circle.surface = "tile";
  circle.points = {{0.0, 0.1, 0.2, true}, {0.5, 0.4, -0.3, false}, {1.0, -0.2, 0.5, true}};
  circle.estimate.mu_hat = 0.68;
  circle.estimate.argmax_t = 0.5;
  circle.estimate.argmax_ax = 0.4 * 9.81;
  circle.estimate.argmax_ay = -0.3 * 9.81;
  circle.estimate.n_samples = 2;
  circle.estimate.surface = "tile";
  inputs.circles.push_back(std::move(circle));

  ResidualTrace trace;
  trace.stream_id = "run a";  // the space must sanitize into the filename
  trace.t = {0.0, 0.025, 0.05};
  trace.lin = {0.1, 0.9, 0.2};
  trace.ang = {0.05, 0.3, 0.01};
  trace.thresholds = Thresholds::make(0.5, 0.2);
  inputs.residuals.push_back(std::move(trace));

  MuComparison cmp;
  cmp.surface = "tile";
  cmp.ground_truth = 0.68;
  cmp.estimates = {0.66, 0.7};
  inputs.comparisons.push_back(std::move(cmp));
  return inputs;
}

}  // namespace

TEST_CASE("plot emission is complete and byte-deterministic") {
  namespace fs = std::filesystem;
  const PlotInputs inputs = sample_plot_inputs();

  testutil::TempDir dir_a("plots-a");
  testutil::TempDir dir_b("plots-b");
  const auto written_a = emit_plots(inputs, dir_a.str(""));
  const auto written_b = emit_plots(inputs, dir_b.str(""));

  REQUIRE(written_a.size() == 6);  // circle svg+txt, residual svg+txt, comparison svg+txt
  REQUIRE(written_b.size() == written_a.size());
  for (std::size_t i = 0; i < written_a.size(); ++i) {
    REQUIRE(fs::exists(written_a[i]));
    CHECK(fs::path(written_a[i]).filename() == fs::path(written_b[i]).filename());
    CHECK(testutil::read_file(written_a[i]) == testutil::read_file(written_b[i]));
  }

  bool saw_sanitized_residual = false;
  for (const auto& path : written_a) {
    const std::string name = fs::path(path).filename().string();
    if (name == "residuals_run_a.svg") saw_sanitized_residual = true;
  }
  CHECK(saw_sanitized_residual);

  const std::string circle_svg = testutil::read_file(written_a[0]);
  CHECK(circle_svg.find("<svg") != std::string::npos);
  CHECK(circle_svg.find("tile") != std::string::npos);
}

TEST_CASE("empty point sets plot as placeholders, empty inputs emit nothing") {
  PlotInputs inputs;
  CircleExport circle;
  circle.surface = "bare";
  inputs.circles.push_back(std::move(circle));
  ResidualTrace trace;
  trace.stream_id = "bare";
  inputs.residuals.push_back(std::move(trace));

  testutil::TempDir dir("plots-empty");
  const auto written = emit_plots(inputs, dir.str(""));
  REQUIRE(written.size() == 4);
  CHECK(testutil::read_file(written[0]).find("no data") != std::string::npos);
  CHECK(testutil::read_file(written[2]).find("no data") != std::string::npos);

  testutil::TempDir dir2("plots-none");
  CHECK(emit_plots(PlotInputs{}, dir2.str("")).empty());
}
