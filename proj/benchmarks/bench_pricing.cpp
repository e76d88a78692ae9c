#include <benchmark/benchmark.h>

#include "merton/binomial.hpp"
#include "merton/pricing.hpp"

using namespace merton;

static void BM_BsmCall(benchmark::State& state) {
    BsmInputs in{1e12, 0.9e12, 0.04, 0.2, 0.25};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bsm_call(in));
        in.strike += 1.0;
    }
}
BENCHMARK(BM_BsmCall);

static void BM_CapitalStructure(benchmark::State& state) {
    const BsmInputs in{1e12, 0.9e12, 0.04, 0.2, 0.25};
    for (auto _ : state) benchmark::DoNotOptimize(capital_structure(in));
}
BENCHMARK(BM_CapitalStructure);

static void BM_TreeCall(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    TreeParams p{.drift = 0.08, .volatility = 0.2, .up_probability = 0.5, .rate = 0.04,
                 .step_years = 0.25 / steps, .steps = steps};
    for (auto _ : state) benchmark::DoNotOptimize(tree_call_price(1e12, 0.9e12, p));
    state.SetComplexityN(steps);
}
BENCHMARK(BM_TreeCall)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNSquared);
