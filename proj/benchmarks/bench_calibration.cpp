#include <benchmark/benchmark.h>

#include "merton/calibration.hpp"
#include "merton/pricing.hpp"

using namespace merton;

namespace {

CalibrationTarget tree_target(int days) {
    CalibrationTarget t{1.0, 1e12, 0.9e12, days / 365.0, 0.04};
    t.fixed = {.volatility = 0.2, .drift = 0.08, .up_probability = 0.5};
    t.observed_price = tree_call_price(1e12, 0.9e12, tree_params_for(t, 0.12, 0.45)).value;
    return t;
}

}  // namespace

static void BM_ImpliedAssetVol(benchmark::State& state) {
    const CalibrationTarget t{bsm_call({1e12, 0.9e12, 0.04, 0.25, 0.5}), 1e12, 0.9e12, 0.5, 0.04};
    for (auto _ : state) benchmark::DoNotOptimize(implied_asset_vol(t));
}
BENCHMARK(BM_ImpliedAssetVol);

static void BM_ImpliedDrift(benchmark::State& state) {
    const CalibrationTarget t = tree_target(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(implied_drift(t));
}
BENCHMARK(BM_ImpliedDrift)->Arg(30)->Arg(91)->Arg(350)->Unit(benchmark::kMillisecond);

static void BM_ImpliedUpProbability(benchmark::State& state) {
    const CalibrationTarget t = tree_target(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(implied_up_probability(t));
}
BENCHMARK(BM_ImpliedUpProbability)->Arg(30)->Arg(91)->Arg(350)->Unit(benchmark::kMillisecond);
