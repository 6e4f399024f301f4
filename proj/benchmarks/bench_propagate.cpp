#include <benchmark/benchmark.h>

#include <cmath>

#include "drio/control.hpp"
#include "drio/propagate.hpp"
#include "drio/robustness.hpp"
#include "drio/train.hpp"

namespace {

constexpr double kT = 381.8;

drio::SubpulseTrain drio3_train(int n = 15)
{
    return drio::digitize(drio::rio_third_order(1.86 * M_PI / kT), n);
}

void bm_delta_train(benchmark::State& state)
{
    const drio::SubpulseTrain t = drio3_train(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(drio::propagate_delta_train(t).final_pop2());
    }
}
BENCHMARK(bm_delta_train)->Arg(15)->Arg(61)->Arg(255);

void bm_full_ode(benchmark::State& state)
{
    const drio::SubpulseTrain t = drio3_train();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            drio::propagate_full(t, drio::QubitState::ground(), 1e-10).final_pop2());
    }
}
BENCHMARK(bm_full_ode);

void bm_effective_ode(benchmark::State& state)
{
    const drio::ContinuousControl c = drio::rio_third_order(1.86 * M_PI / kT);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            drio::propagate_effective(c, drio::QubitState::ground(), 1e-10).final_pop2());
    }
}
BENCHMARK(bm_effective_ode);

void bm_modes(benchmark::State& state)
{
    const drio::SubpulseTrain t = drio3_train();
    const auto trunc = drio::ModeTruncation::for_train(t, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            drio::propagate_modes(t, trunc, drio::QubitState::ground(), 1e-9).final_pop2());
    }
}
BENCHMARK(bm_modes)->Arg(0)->Arg(5)->Arg(20);

void bm_scan_delta(benchmark::State& state)
{
    const drio::SubpulseTrain t = drio3_train();
    const std::vector<double> grid = drio::default_alpha_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(drio::scan(t, grid).probabilities.size());
    }
}
BENCHMARK(bm_scan_delta);

}  // namespace

BENCHMARK_MAIN();
