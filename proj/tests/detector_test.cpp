#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "slipkit/detector.hpp"
#include "slipkit/rng.hpp"
#include "test_util.hpp"

using namespace slipkit;
using testutil::make_record;
using testutil::test_geom;

namespace {

// Builds a stream at 10 Hz where each entry picks which channels trip
// against thresholds (0.5, 0.2): 'l' linear only, 'a' angular only,
// 'b' both, '.' clean. Linear residual is 1.0 + 0.5*i for flagged samples
// so peaks are predictable; angular residual is 0.5.
std::vector<TelemetryRecord> pattern_stream(const std::string& pattern) {
  std::vector<TelemetryRecord> out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    double vx = 2.0;
    double wpsi = 0.0;
    if (c == 'l' || c == 'b') vx = 2.0 - (1.0 + 0.5 * static_cast<double>(i));
    if (c == 'a' || c == 'b') wpsi = 0.5;
    out.push_back(make_record(0.1 * static_cast<double>(i), 2.0, 0.0, 0.0, 0.0,
                              vx, 0.0, wpsi));
  }
  return out;
}

std::vector<SlipFlags> flags_for(const std::vector<TelemetryRecord>& records) {
  const Thresholds th = Thresholds::make(0.5, 0.2);
  std::vector<SlipFlags> out;
  for (const auto& r : records) out.push_back(detect_step(r, th, test_geom()));
  return out;
}

}  // namespace

TEST_CASE("threshold construction rejects non-positive values") {
  CHECK_THROWS_AS(Thresholds::make(0.0, 0.1), InputDomainError);
  CHECK_THROWS_AS(Thresholds::make(0.1, -0.2), InputDomainError);
  CHECK_THROWS_AS(Thresholds::make(std::nan(""), 0.1), InputDomainError);
  const Thresholds th = Thresholds::make(0.3, 0.1);
  CHECK(th.delta_lin == 0.3);
  CHECK(th.delta_ang == 0.1);
}

TEST_CASE("residuals compare command against measurement") {
  const VehicleGeometry geom = test_geom();
  const TelemetryRecord r = make_record(0.0, 2.0, 0.3, 0.0, 0.0, 1.5, 0.0, 0.9);
  CHECK(linear_residual(r.u, r.y) == 0.5);
  const double expected = expected_yaw_rate(r.u, geom);
  CHECK(angular_residual(r.u, r.y, geom) == std::abs(expected - 0.9));
  // Residuals are magnitudes: overshoot counts the same as undershoot.
  const TelemetryRecord over = make_record(0.0, 2.0, 0.0, 0.0, 0.0, 2.5, 0.0, 0.0);
  CHECK(linear_residual(over.u, over.y) == 0.5);
}

TEST_CASE("detection is inclusive at the threshold") {
  const VehicleGeometry geom = test_geom();
  const Thresholds th = Thresholds::make(0.5, 0.25);

  // Residual exactly at the threshold trips the flag.
  const TelemetryRecord at = make_record(0.0, 2.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.25);
  const SlipFlags f_at = detect_step(at, th, geom);
  CHECK(f_at.d_lin);
  CHECK(f_at.d_ang);
  CHECK_FALSE(f_at.no_slip);

  // Just below stays clean.
  const TelemetryRecord below =
      make_record(0.0, 2.0, 0.0, 0.0, 0.0, 1.5000001, 0.0, 0.2499999);
  const SlipFlags f_below = detect_step(below, th, geom);
  CHECK_FALSE(f_below.d_lin);
  CHECK_FALSE(f_below.d_ang);
  CHECK(f_below.no_slip);
}

TEST_CASE("no_slip is always the negation of both flags") {
  const VehicleGeometry geom = test_geom();
  const Thresholds th = Thresholds::make(0.5, 0.2);
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const TelemetryRecord r =
        make_record(0.0, rng.uniform(0.0, 4.0), rng.uniform(-1.0, 1.0), 0.0, 0.0,
                    rng.uniform(0.0, 4.0), 0.0, rng.uniform(-2.0, 2.0));
    const SlipFlags f = detect_step(r, th, geom);
    REQUIRE(f.no_slip == (!f.d_lin && !f.d_ang));
  }
}

TEST_CASE("events split on gaps larger than the refractory") {
  const auto records = pattern_stream(".ll..a....");
  const auto flags = flags_for(records);

  EventConfig cfg;
  cfg.refractory = 0.25;
  const auto events = extract_events(records, flags, test_geom(), cfg);
  REQUIRE(events.size() == 2);
  CHECK(events[0].onset_t == 0.1);
  CHECK(events[0].end_t == doctest::Approx(0.2));
  CHECK(events[0].kind == SlipKind::linear);
  CHECK(events[0].peak_residual == doctest::Approx(2.0));  // 1.0 + 0.5*2
  CHECK(events[1].onset_t == 0.5);
  CHECK(events[1].kind == SlipKind::angular);
  CHECK(events[1].peak_residual == doctest::Approx(0.5));

  // A wider refractory bridges the gap into a single mixed event.
  EventConfig wide;
  wide.refractory = 0.35;
  const auto merged = extract_events(records, flags, test_geom(), wide);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].onset_t == 0.1);
  CHECK(merged[0].end_t == 0.5);
  CHECK(merged[0].kind == SlipKind::both);
  CHECK(merged[0].peak_residual == doctest::Approx(2.0));
}

TEST_CASE("min_consecutive drops events without a long enough run") {
  const auto records = pattern_stream(".ll..a....");
  const auto flags = flags_for(records);
  EventConfig cfg;
  cfg.refractory = 0.25;
  cfg.min_consecutive = 2;
  const auto events = extract_events(records, flags, test_geom(), cfg);
  REQUIRE(events.size() == 1);
  CHECK(events[0].onset_t == 0.1);

  // A merged cluster keeps its best sample-adjacent run: flagged samples at
  // indices 1,2 and 4 merge (gap 0.2 <= 0.25) and the run of two qualifies.
  const auto gappy = pattern_stream(".ll.l.....");
  const auto gappy_flags = flags_for(gappy);
  const auto kept = extract_events(gappy, gappy_flags, test_geom(), cfg);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].onset_t == 0.1);
  CHECK(kept[0].end_t == doctest::Approx(0.4));

  // Three isolated singles, none qualifying.
  const auto singles = pattern_stream(".l...l...l");
  const auto singles_flags = flags_for(singles);
  CHECK(extract_events(singles, singles_flags, test_geom(), cfg).empty());
}

TEST_CASE("events carry the surface of their first flagged sample") {
  auto records = pattern_stream(".ll.......");
  records[1].surface = "ice";
  records[2].surface = "asphalt";
  const auto flags = flags_for(records);
  const auto events = extract_events(records, flags, test_geom(), {});
  REQUIRE(events.size() == 1);
  REQUIRE(events[0].surface.has_value());
  CHECK(*events[0].surface == "ice");
}

TEST_CASE("extract_events validates its inputs") {
  const auto records = pattern_stream("...");
  auto flags = flags_for(records);
  flags.pop_back();
  CHECK_THROWS_AS(extract_events(records, flags, test_geom(), {}), InputDomainError);

  auto unordered = pattern_stream("...");
  unordered[2].t = unordered[1].t;
  const auto f3 = flags_for(unordered);
  CHECK_THROWS_AS(extract_events(unordered, f3, test_geom(), {}), OrderingError);

  EventConfig bad;
  bad.refractory = -0.1;
  CHECK_THROWS_AS(extract_events(records, flags_for(records), test_geom(), bad),
                  InputDomainError);
  bad.refractory = 0.5;
  bad.min_consecutive = 0;
  CHECK_THROWS_AS(extract_events(records, flags_for(records), test_geom(), bad),
                  InputDomainError);

  CHECK(extract_events({}, {}, test_geom(), {}).empty());
}

TEST_CASE("labeled events merge with the same refractory rule") {
  auto records = pattern_stream("..........");
  for (auto& r : records) r.slip_label = false;
  records[1].slip_label = true;
  records[2].slip_label = true;
  records[5].slip_label = true;
  records[1].surface = "tile";

  EventConfig cfg;
  cfg.refractory = 0.25;
  const auto events = labeled_events(records, cfg);
  REQUIRE(events.size() == 2);
  CHECK(events[0].onset_t == 0.1);
  CHECK(events[0].end_t == doctest::Approx(0.2));
  CHECK(events[0].kind == SlipKind::both);
  CHECK(events[0].peak_residual == 0.0);
  CHECK(*events[0].surface == "tile");
  CHECK(events[1].onset_t == 0.5);

  cfg.refractory = 0.35;
  CHECK(labeled_events(records, cfg).size() == 1);

  records[4].slip_label.reset();
  CHECK_THROWS_AS(labeled_events(records, cfg), LabelingError);
}

TEST_CASE("smoothing averages only the velocity and yaw-rate channels") {
  std::vector<TelemetryRecord> records;
  for (int i = 0; i < 4; ++i) {
    auto r = make_record(0.1 * i, 2.0, 0.1, 5.0 + i, -1.0, 1.0 + i, 0.25, 2.0 * (i + 1));
    records.push_back(r);
  }
  const auto smoothed = smooth_observations(records, 2);
  REQUIRE(smoothed.size() == 4);
  CHECK(smoothed[0].y.v_x_hat == 1.0);
  CHECK(smoothed[1].y.v_x_hat == 1.5);
  CHECK(smoothed[2].y.v_x_hat == 2.5);
  CHECK(smoothed[3].y.v_x_hat == 3.5);
  CHECK(smoothed[0].y.w_psi_hat == 2.0);
  CHECK(smoothed[1].y.w_psi_hat == 3.0);
  CHECK(smoothed[3].y.w_psi_hat == 7.0);
  // Every other channel is untouched.
  for (int i = 0; i < 4; ++i) {
    CHECK(smoothed[i].t == records[i].t);
    CHECK(smoothed[i].u.v == records[i].u.v);
    CHECK(smoothed[i].y.a_x_hat == records[i].y.a_x_hat);
    CHECK(smoothed[i].y.a_y_hat == records[i].y.a_y_hat);
    CHECK(smoothed[i].y.v_y_hat == records[i].y.v_y_hat);
  }

  // Window 0 and 1 are the identity; negative windows are rejected.
  const auto same = smooth_observations(records, 1);
  CHECK(same[2].y.v_x_hat == records[2].y.v_x_hat);
  const auto zero = smooth_observations(records, 0);
  CHECK(zero[2].y.v_x_hat == records[2].y.v_x_hat);
  CHECK_THROWS_AS(smooth_observations(records, -1), InputDomainError);
}

TEST_CASE("slip kind names are stable") {
  CHECK(std::string(to_string(SlipKind::linear)) == "linear");
  CHECK(std::string(to_string(SlipKind::angular)) == "angular");
  CHECK(std::string(to_string(SlipKind::both)) == "both");
}
