#include <benchmark/benchmark.h>

#include "cbi/estimate.hpp"
#include "cbi/mechanisms.hpp"
#include "cbi/model.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"

namespace {

cbi::ModelParams diffusive_model() {
    cbi::ModelParams p;
    p.c = cbi::Vec2{{0.5, 0.5}};
    p.beta = cbi::Vec2{{1.0, 1.0}};
    p.B = cbi::Mat2{{{-1.0, 1.0}, {1.0, -1.0}}};
    p.nu.atoms.push_back({cbi::Vec2{{1.0, 1.0}}, 1.0});
    return p;
}

void ExpmTb(benchmark::State& state) {
    const auto d = cbi::build_derived(diffusive_model());
    double t = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cbi::expm_tb(d, t));
        t += 1e-6;
    }
}
BENCHMARK(ExpmTb);

void EulerPath(benchmark::State& state) {
    const auto p = diffusive_model();
    const auto d = cbi::build_derived(p);
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(cbi::simulate_euler(p, d, 100.0, h, 7));
    state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(EulerPath)->Arg(64)->Arg(256);

void ExactImmigrationPath(benchmark::State& state) {
    cbi::ModelParams p = diffusive_model();
    p.c = cbi::Vec2{};
    const auto d = cbi::build_derived(p);
    for (auto _ : state)
        benchmark::DoNotOptimize(cbi::simulate_exact_immigration(p, d, state.range(0), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ExactImmigrationPath)->Arg(1000)->Arg(100000);

void ClsEstimate(benchmark::State& state) {
    cbi::ModelParams p = diffusive_model();
    p.c = cbi::Vec2{};
    const auto d = cbi::build_derived(p);
    const auto path = cbi::simulate_exact_immigration(p, d, state.range(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(cbi::cls_estimate(path));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ClsEstimate)->Arg(1000)->Arg(100000);

void VMatrices(benchmark::State& state) {
    const auto p = diffusive_model();
    const auto d = cbi::build_derived(p);
    for (auto _ : state) benchmark::DoNotOptimize(cbi::v_matrices(p, d));
}
BENCHMARK(VMatrices);

void LaplaceSolve(benchmark::State& state) {
    const auto ctx = cbi::MechanismContext::make(diffusive_model());
    for (auto _ : state)
        benchmark::DoNotOptimize(
            cbi::laplace_from_zero(ctx, 1.0, cbi::Vec2{{1.0, 0.5}}, state.range(0)));
}
BENCHMARK(LaplaceSolve)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
