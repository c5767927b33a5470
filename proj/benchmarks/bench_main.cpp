#include <benchmark/benchmark.h>

#include "pairdeg/atlas.hpp"
#include "pairdeg/discriminant.hpp"
#include "pairdeg/monodromy.hpp"
#include "pairdeg/observables.hpp"

using namespace pairdeg;

namespace {

const cplx kPDP{0.0, -0.17677669529663687};

const PairingHamiltonian& reference() {
    static const PairingHamiltonian h(ModelSpec::three_level(-0.5));
    return h;
}

void BM_Eigendecompose(benchmark::State& state) {
    const CMatrix m = reference().at(cplx(0.03, -0.12));
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(m));
}
BENCHMARK(BM_Eigendecompose);

void BM_DiscriminantPoly(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(discriminant_poly(reference()));
}
BENCHMARK(BM_DiscriminantPoly)->Unit(benchmark::kMicrosecond);

void BM_FindDegeneracies(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(find_degeneracies(reference()));
}
BENCHMARK(BM_FindDegeneracies)->Unit(benchmark::kMicrosecond);

void BM_TraceLoop(benchmark::State& state) {
    const auto roots = find_degeneracies(reference());
    const LoopSpec loop{kPDP, 0.01, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(trace_loop(reference(), loop, {.known_roots = roots}));
}
BENCHMARK(BM_TraceLoop)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_CoefficientExtract(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(coefficient_extract(reference(), kPDP));
}
BENCHMARK(BM_CoefficientExtract)->Unit(benchmark::kMicrosecond);

void BM_Atlas(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_atlas(reference()));
}
BENCHMARK(BM_Atlas)->Unit(benchmark::kMillisecond);

void BM_Heatmap(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(discriminant_heatmap(reference(), -0.3, 0.3, -0.3, 0.3, 121, 121, threads));
}
BENCHMARK(BM_Heatmap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
