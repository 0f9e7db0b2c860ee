#include <benchmark/benchmark.h>

#include "optstop/diagnostics.hpp"
#include "optstop/flowsim.hpp"
#include "optstop/putsolver.hpp"
#include "optstop/rng.hpp"

using namespace optstop;

static void BM_PriceFd(benchmark::State& state) {
    const GridConfig cfg{static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(price_put_fd(GbmParams{}, cfg));
}
BENCHMARK(BM_PriceFd)->Args({250, 500})->Args({1000, 2000})->Unit(benchmark::kMillisecond);

static void BM_Binomial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(price_put_binomial(GbmParams{}, 100.0, state.range(0)));
}
BENCHMARK(BM_Binomial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_GbmFlow(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_gbm_flow(GbmParams{}, 1.0, state.range(0), derive_seed(1, i++)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GbmFlow)->Arg(1000)->Arg(10000);

static void BM_EntryTime(benchmark::State& state) {
    const Boundary b = extract_boundary(price_put_fd(GbmParams{}));
    const McControls mc{static_cast<std::size_t>(state.range(0)), 1e-4, 1, true};
    for (auto _ : state) benchmark::DoNotOptimize(sample_entry_time(b, GbmParams{}, {0.5, 90.0}, mc));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EntryTime)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
