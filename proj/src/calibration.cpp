#include "slipkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "slipkit/kernels.hpp"
#include "slipkit/rng.hpp"

namespace slipkit {

namespace {

Thresholds thresholds_from_pooled(const std::vector<double>& lin,
                                  const std::vector<double>& ang) {
  if (lin.size() < 2) {
    throw CalibrationError("calibration needs at least two samples, got " +
                           std::to_string(lin.size()));
  }
  const kernels::MeanStd lin_stats = kernels::mean_std(lin);
  const kernels::MeanStd ang_stats = kernels::mean_std(ang);
  const double delta_lin = lin_stats.mean + 2.0 * lin_stats.std;
  const double delta_ang = ang_stats.mean + 2.0 * ang_stats.std;
  if (!(delta_lin > 0.0) || !(delta_ang > 0.0)) {
    throw CalibrationError("degenerate training residuals produce a zero threshold");
  }
  return Thresholds::make(delta_lin, delta_ang);
}

Thresholds thresholds_from_streams(std::span<const Stream* const> training,
                                   const VehicleGeometry& geom) {
  std::vector<double> lin;
  std::vector<double> ang;
  for (const Stream* s : training) {
    const kernels::ResidualBatch batch = kernels::compute_residuals(s->records, geom);
    lin.insert(lin.end(), batch.lin.begin(), batch.lin.end());
    ang.insert(ang.end(), batch.ang.begin(), batch.ang.end());
  }
  return thresholds_from_pooled(lin, ang);
}

}  // namespace

Thresholds compute_thresholds(std::span<const Stream> training,
                              const VehicleGeometry& geom) {
  std::vector<const Stream*> ptrs;
  ptrs.reserve(training.size());
  for (const Stream& s : training) ptrs.push_back(&s);
  return thresholds_from_streams(ptrs, geom);
}

FoldAssignment kfold_split(std::span<const std::string> stream_ids, int k,
                           std::uint64_t seed) {
  if (k < 2) {
    throw FoldError("k must be at least 2, got " + std::to_string(k));
  }
  if (static_cast<std::size_t>(k) > stream_ids.size()) {
    throw FoldError("k = " + std::to_string(k) + " exceeds the stream count " +
                    std::to_string(stream_ids.size()));
  }
  std::set<std::string> unique(stream_ids.begin(), stream_ids.end());
  if (unique.size() != stream_ids.size()) {
    throw FoldError("stream ids must be unique");
  }
  std::vector<std::string> shuffled(stream_ids.begin(), stream_ids.end());
  Rng rng(seed);
  rng.shuffle(shuffled);
  FoldAssignment out;
  out.k = k;
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    out.assignment[shuffled[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return out;
}

namespace {

StreamEvaluation evaluate_stream(const Stream& stream, const Thresholds& th,
                                 const VehicleGeometry& geom, const EvalConfig& cfg) {
  StreamEvaluation out;
  out.id = stream.id;
  const std::vector<SlipFlags> flags = kernels::detect_flags(stream.records, th, geom);
  const std::vector<SlipEvent> detected =
      extract_events(stream.records, flags, geom, cfg.events);
  const std::vector<SlipEvent> truth = labeled_events(stream.records, cfg.events);
  out.labeled_count = truth.size();
  out.detected_count = detected.size();
  out.report = match_events(truth, detected, cfg.match_window);
  out.friction = estimate_stream(stream.records, th, geom, cfg.g);
  return out;
}

}  // namespace

CrossValidation cross_validate(std::span<const Stream> streams, int k,
                               std::uint64_t seed, const VehicleGeometry& geom,
                               const EvalConfig& cfg) {
  for (const Stream& s : streams) {
    for (std::size_t i = 0; i < s.records.size(); ++i) {
      if (!s.records[i].slip_label.has_value()) {
        throw LabelingError("stream '" + s.id + "' record " + std::to_string(i) +
                            " has no slip label");
      }
    }
  }
  std::vector<std::string> ids;
  ids.reserve(streams.size());
  for (const Stream& s : streams) ids.push_back(s.id);

  CrossValidation out;
  out.seed = seed;
  out.assignment = kfold_split(ids, k, seed);

  for (int fold = 0; fold < k; ++fold) {
    FoldResult fr;
    fr.index = fold;
    std::vector<const Stream*> train;
    std::vector<const Stream*> test;
    for (const Stream& s : streams) {
      if (out.assignment.assignment.at(s.id) == fold) {
        fr.test_ids.push_back(s.id);
        test.push_back(&s);
      } else {
        fr.train_ids.push_back(s.id);
        train.push_back(&s);
      }
    }
    fr.thresholds = thresholds_from_streams(train, geom);

    for (const Stream* s : test) {
      StreamEvaluation ev = evaluate_stream(*s, fr.thresholds, geom, cfg);
      fr.report.tp += ev.report.tp;
      fr.report.fp += ev.report.fp;
      fr.report.fn += ev.report.fn;
      fr.report.matches.insert(fr.report.matches.end(), ev.report.matches.begin(),
                               ev.report.matches.end());
      fr.streams.push_back(std::move(ev));
    }
    fr.prf = precision_recall_f1(fr.report);

    out.pooled.tp += fr.report.tp;
    out.pooled.fp += fr.report.fp;
    out.pooled.fn += fr.report.fn;
    out.pooled.matches.insert(out.pooled.matches.end(), fr.report.matches.begin(),
                              fr.report.matches.end());
    out.folds.push_back(std::move(fr));
  }
  out.pooled_prf = precision_recall_f1(out.pooled);
  return out;
}

const char* to_string(PullDirection d) {
  switch (d) {
    case PullDirection::lateral:
      return "lateral";
    case PullDirection::longitudinal:
      return "longitudinal";
    default:
      return "diagonal";
  }
}

PullTestReport pull_test_mu(std::span<const PullTrial> trials) {
  if (trials.empty()) {
    throw CalibrationError("pull test needs at least one trial");
  }
  PullTestReport out;
  std::map<PullDirection, std::vector<double>> per_direction;
  std::vector<double> all;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const PullTrial& t = trials[i];
    if (!std::isfinite(t.f_pull) || t.f_pull <= 0.0) {
      throw InputDomainError("trial " + std::to_string(i) + ": f_pull must be positive");
    }
    if (!std::isfinite(t.f_normal) || t.f_normal <= 0.0) {
      throw InputDomainError("trial " + std::to_string(i) + ": f_normal must be positive");
    }
    const double mu = t.f_pull / t.f_normal;
    per_direction[t.direction].push_back(mu);
    all.push_back(mu);
  }
  for (const auto& [direction, values] : per_direction) {
    const kernels::MeanStd ms = kernels::mean_std(values);
    out.per_direction[direction] = PullStats{ms.mean, ms.n};
  }
  const kernels::MeanStd overall = kernels::mean_std(all);
  out.overall_mean = overall.mean;
  out.n = overall.n;
  return out;
}

}  // namespace slipkit
