#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slipkit/estimator.hpp"
#include "slipkit/kernels.hpp"
#include "slipkit/rng.hpp"
#include "test_util.hpp"

using namespace slipkit;
using testutil::make_record;
using testutil::test_geom;

namespace {

TelemetryRecord accel_record(double t, double ax, double ay) {
  return make_record(t, 0.0, 0.0, ax, ay, 0.0, 0.0, 0.0);
}

SlipFlags clean() { return SlipFlags{}; }

SlipFlags flagged() {
  SlipFlags f;
  f.d_lin = true;
  f.no_slip = false;
  return f;
}

// Streams whose flags are fully controlled: v == vx means clean, a gap of
// 2 m/s trips the linear channel against thresholds (1, 1).
std::vector<TelemetryRecord> random_stream(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<TelemetryRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool slip = rng.below(3) == 0;
    TelemetryRecord r = make_record(0.025 * static_cast<double>(i), slip ? 2.0 : 1.0,
                                    0.0, rng.gaussian(0.0, 4.0),
                                    rng.gaussian(0.0, 4.0), 1.0, 0.0, 0.0);
    switch (rng.below(3)) {
      case 0: r.surface = "A"; break;
      case 1: r.surface = "B"; break;
      default: break;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("update folds cleared samples into a running maximum") {
  FrictionEstimate est;
  CHECK_FALSE(est.valid());

  est = update(est, accel_record(0.0, 3.0, 4.0), clean(), 9.81);
  CHECK(est.valid());
  CHECK(est.mu_hat == std::hypot(3.0, 4.0) / 9.81);
  CHECK(est.argmax_t == 0.0);
  CHECK(est.argmax_ax == 3.0);
  CHECK(est.argmax_ay == 4.0);
  CHECK(est.n_samples == 1);

  // A weaker sample keeps the argmax; the counter still advances.
  est = update(est, accel_record(1.0, 1.0, 1.0), clean(), 9.81);
  CHECK(est.argmax_t == 0.0);
  CHECK(est.n_samples == 2);

  // A flagged sample is ignored entirely, however large.
  est = update(est, accel_record(2.0, 50.0, 50.0), flagged(), 9.81);
  CHECK(est.mu_hat == std::hypot(3.0, 4.0) / 9.81);
  CHECK(est.n_samples == 2);

  // An exact tie keeps the earlier argmax.
  est = update(est, accel_record(3.0, 3.0, 4.0), clean(), 9.81);
  CHECK(est.argmax_t == 0.0);
  CHECK(est.n_samples == 3);

  // A strictly larger sample takes over.
  est = update(est, accel_record(4.0, 6.0, 8.0), clean(), 9.81);
  CHECK(est.mu_hat == std::hypot(6.0, 8.0) / 9.81);
  CHECK(est.argmax_t == 4.0);
  CHECK(est.argmax_ax == 6.0);
}

TEST_CASE("an estimate with no cleared samples stays invalid") {
  FrictionEstimate est;
  for (int i = 0; i < 5; ++i) {
    est = update(est, accel_record(i, 2.0, 2.0), flagged(), 9.81);
  }
  CHECK_FALSE(est.valid());
  CHECK(est.n_samples == 0);
}

TEST_CASE("estimate_stream equals the per-surface update fold bit for bit") {
  const VehicleGeometry geom = test_geom();
  const Thresholds th = Thresholds::make(1.0, 1.0);

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng size_rng(seed * 31);
    const auto stream = random_stream(seed, 1 + size_rng.below(200));
    const auto got = estimate_stream(stream, th, geom, 9.81);

    std::map<std::string, FrictionEstimate> want;
    for (const auto& rec : stream) {
      const std::string key = rec.surface.value_or(kDefaultSurface);
      const SlipFlags f = detect_step(rec, th, geom);
      auto [it, inserted] = want.try_emplace(key);
      if (inserted) it->second.surface = key;
      it->second = update(it->second, rec, f, 9.81);
    }

    REQUIRE(got.size() == want.size());
    for (const auto& [key, w] : want) {
      REQUIRE(got.count(key) == 1);
      const FrictionEstimate& g = got.at(key);
      REQUIRE(g.valid() == w.valid());
      REQUIRE(g.n_samples == w.n_samples);
      if (w.valid()) {
        REQUIRE(g.mu_hat == w.mu_hat);
        REQUIRE(g.argmax_t == w.argmax_t);
        REQUIRE(g.argmax_ax == w.argmax_ax);
        REQUIRE(g.argmax_ay == w.argmax_ay);
      }
    }
  }
}

TEST_CASE("the estimate is monotonic in stream prefixes") {
  const VehicleGeometry geom = test_geom();
  const Thresholds th = Thresholds::make(1.0, 1.0);
  auto stream = random_stream(404, 120);
  for (auto& rec : stream) rec.surface.reset();

  double prev = 0.0;
  bool seen_valid = false;
  for (std::size_t n = 1; n <= stream.size(); ++n) {
    const auto est = estimate_stream({stream.data(), n}, th, geom, 9.81);
    const FrictionEstimate& e = est.at(kDefaultSurface);
    if (!e.valid()) continue;
    if (seen_valid) REQUIRE(e.mu_hat >= prev);
    prev = e.mu_hat;
    seen_valid = true;
  }
  CHECK(seen_valid);
}

TEST_CASE("untagged records fall under the default surface key") {
  const Thresholds th = Thresholds::make(1.0, 1.0);
  std::vector<TelemetryRecord> stream;
  stream.push_back(accel_record(0.0, 1.0, 0.0));
  auto tagged = accel_record(1.0, 2.0, 0.0);
  tagged.surface = "ice";
  stream.push_back(tagged);

  const auto est = estimate_stream(stream, th, test_geom(), 9.81);
  REQUIRE(est.size() == 2);
  CHECK(est.count(kDefaultSurface) == 1);
  CHECK(est.count("ice") == 1);
  CHECK(est.at(kDefaultSurface).surface.value_or("") == kDefaultSurface);
  CHECK(est.at("ice").mu_hat == 2.0 / 9.81);
}

TEST_CASE("friction_circle_points exports every record with its flag") {
  const VehicleGeometry geom = test_geom();
  const Thresholds th = Thresholds::make(1.0, 1.0);
  const auto stream = random_stream(7, 80);

  const auto circles = friction_circle_points(stream, th, geom, 9.81);
  const auto estimates = estimate_stream(stream, th, geom, 9.81);
  REQUIRE(circles.size() == estimates.size());

  std::size_t total_points = 0;
  for (const auto& [key, circle] : circles) {
    CHECK(circle.surface == key);
    total_points += circle.points.size();
    const FrictionEstimate& e = estimates.at(key);
    CHECK(circle.estimate.n_samples == e.n_samples);
    if (e.valid()) CHECK(circle.estimate.mu_hat == e.mu_hat);
    for (const auto& p : circle.points) {
      // Cleared points can never sit outside the estimated circle.
      if (p.no_slip) {
        REQUIRE(std::hypot(p.ax_g, p.ay_g) <= circle.estimate.mu_hat * (1.0 + 1e-12));
      }
    }
  }
  CHECK(total_points == stream.size());
}

TEST_CASE("circle exports round-trip through the text format exactly") {
  const auto stream = random_stream(99, 60);
  const auto circles =
      friction_circle_points(stream, Thresholds::make(1.0, 1.0), test_geom(), 9.81);

  for (const auto& [key, circle] : circles) {
    std::ostringstream out;
    write_circle_export(out, circle);
    std::istringstream in(out.str());
    const CircleExport back = read_circle_export(in);

    CHECK(back.surface == circle.surface);
    REQUIRE(back.points.size() == circle.points.size());
    for (std::size_t i = 0; i < back.points.size(); ++i) {
      REQUIRE(back.points[i].t == circle.points[i].t);
      REQUIRE(back.points[i].ax_g == circle.points[i].ax_g);
      REQUIRE(back.points[i].ay_g == circle.points[i].ay_g);
      REQUIRE(back.points[i].no_slip == circle.points[i].no_slip);
    }
    CHECK(back.estimate.valid() == circle.estimate.valid());
    CHECK(back.estimate.n_samples == circle.estimate.n_samples);
    if (circle.estimate.valid()) {
      CHECK(back.estimate.mu_hat == circle.estimate.mu_hat);
      CHECK(back.estimate.argmax_t == circle.estimate.argmax_t);
      CHECK(back.estimate.argmax_ax == circle.estimate.argmax_ax);
      CHECK(back.estimate.argmax_ay == circle.estimate.argmax_ay);
    }

    // Writing the parsed copy reproduces the bytes.
    std::ostringstream again;
    write_circle_export(again, back);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("circle export parsing rejects malformed input") {
  CHECK_THROWS_AS(
      [] {
        std::istringstream in("point 0 0.1 0.2 1\n");
        return read_circle_export(in);
      }(),
      ParseError);
  CHECK_THROWS_AS(
      [] {
        std::istringstream in("surface sim\npoint 0 not_a_number 0.2 1\n"
                              "summary 0 0 0 0 0 0\n");
        return read_circle_export(in);
      }(),
      ParseError);
  CHECK_THROWS_AS(
      [] {
        // valid flag contradicting the sample count
        std::istringstream in("surface sim\nsummary 1 0.5 0 0 0 0\n");
        return read_circle_export(in);
      }(),
      ParseError);
}
