// Serial reference vs parallel kernels on synthetic telemetry.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "slipkit/core.hpp"
#include "slipkit/detector.hpp"
#include "slipkit/kernels.hpp"
#include "slipkit/rng.hpp"
#include "slipkit/simulator.hpp"

namespace {

using namespace slipkit;

const VehicleGeometry kGeom = VehicleGeometry::make(0.159, 0.171, 0.054, 3.5);
const Thresholds kThresholds = Thresholds::make(0.3, 0.1);

std::vector<TelemetryRecord> make_records(std::size_t n) {
  Rng rng(12345);
  std::vector<TelemetryRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TelemetryRecord r;
    r.t = static_cast<double>(i) * 0.025;
    r.u.v = 3.0 + rng.gaussian(0.0, 0.5);
    r.u.delta = rng.uniform(-0.4, 0.4);
    r.y.v_x_hat = r.u.v + rng.gaussian(0.0, 0.1);
    r.y.v_y_hat = rng.gaussian(0.0, 0.05);
    r.y.w_psi_hat = rng.gaussian(0.0, 0.2);
    r.y.a_x_hat = rng.gaussian(0.0, 2.0);
    r.y.a_y_hat = rng.gaussian(0.0, 2.0);
    out.push_back(r);
  }
  return out;
}

std::vector<double> make_values(std::size_t n) {
  Rng rng(777);
  std::vector<double> out(n);
  for (double& v : out) v = rng.gaussian(1.0, 0.3);
  return out;
}

std::vector<SlipFlags> make_flags(std::size_t n) {
  Rng rng(888);
  std::vector<SlipFlags> out(n);
  for (SlipFlags& f : out) {
    const bool slip = rng.uniform01() < 0.2;
    f.d_lin = slip;
    f.d_ang = false;
    f.no_slip = !slip;
  }
  return out;
}

void BM_ResidualsSerial(benchmark::State& state) {
  const auto records = make_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::compute_residuals_serial(records, kGeom));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ResidualsParallel(benchmark::State& state) {
  const auto records = make_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::compute_residuals(records, kGeom));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FlagsSerial(benchmark::State& state) {
  const auto records = make_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::detect_flags_serial(records, kThresholds, kGeom));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FlagsParallel(benchmark::State& state) {
  const auto records = make_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::detect_flags(records, kThresholds, kGeom));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MeanStdSerial(benchmark::State& state) {
  const auto values = make_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::mean_std_serial(values));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MeanStdParallel(benchmark::State& state) {
  const auto values = make_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::mean_std(values));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NoSlipMaxSerial(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto values = make_values(n);
  const auto flags = make_flags(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::no_slip_max_serial(values, flags));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NoSlipMaxParallel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto values = make_values(n);
  const auto flags = make_flags(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::no_slip_max(values, flags));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateRun(benchmark::State& state) {
  SimConfig cfg = standard_scenarios().at("drift-turn");
  cfg.duration = static_cast<double>(state.range(0)) * cfg.dt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_run(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ResidualsSerial)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_ResidualsParallel)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_FlagsSerial)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_FlagsParallel)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_MeanStdSerial)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_MeanStdParallel)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_NoSlipMaxSerial)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_NoSlipMaxParallel)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_SimulateRun)->Arg(1 << 12);

BENCHMARK_MAIN();
