#include <benchmark/benchmark.h>

#include <chrono>
#include <cmath>

#include "merton/surface.hpp"

using namespace merton;
using namespace std::chrono;

namespace {

MarketSnapshot flat_snapshot(int length) {
    MarketSnapshot s;
    const Date end = sys_days{year{2025} / 2 / 13};
    for (int i = length - 1; i >= 0; --i) {
        const Date d = end - days{i};
        s.close_history.push_back({d, 6000.0 + i});
        s.rates.values.emplace(d, std::expm1(0.04));
    }
    s.as_of = end;
    s.equity_close = 6000.0;
    return s;
}

SurfaceAxes axes() {
    SurfaceAxes a;
    for (int i = 1; i <= 90; ++i) a.moneyness.push_back(i / 100.0);
    a.maturity_days = {7, 30, 63, 91};
    return a;
}

}  // namespace

static void BM_AssetVolSurface(benchmark::State& state) {
    const MarketSnapshot snap = flat_snapshot(400);
    SurfaceBuildConfig config;
    config.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_surface(snap, axes(), CalibrationTask::AssetVol, config));
}
BENCHMARK(BM_AssetVolSurface)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_UpProbabilitySurface(benchmark::State& state) {
    const MarketSnapshot snap = flat_snapshot(400);
    SurfaceBuildConfig config;
    config.sigma_override = 0.2;
    config.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_surface(snap, axes(), CalibrationTask::UpProb, config));
}
BENCHMARK(BM_UpProbabilitySurface)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
