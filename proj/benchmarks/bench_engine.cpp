#include <benchmark/benchmark.h>

#include <ckp/hierarchy.hpp>
#include <ckp/recursion.hpp>

using namespace ckp;

static void BM_LaxPower(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(lax_power(n, n + 3));
}
BENCHMARK(BM_LaxPower)->Arg(3)->Arg(5)->Arg(7);

static void BM_Flow(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(flow(n));
}
BENCHMARK(BM_Flow)->Arg(3)->Arg(5)->Arg(7);

static void BM_Integrate(benchmark::State &state) {
    const DiffPoly p = DiffPoly::parse("q*q[4]*r^2 + q'*r''*q^2 + q*r*q[3]");
    for (auto _ : state) {
        Integrator integ;
        benchmark::DoNotOptimize(integ.integrate(p));
    }
}
BENCHMARK(BM_Integrate);

static void BM_RecursionStep(benchmark::State &state) {
    const RecursionMatrix rm = build_matrix();
    const FlowPair f = flow(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Integrator integ;
        benchmark::DoNotOptimize(step(rm, f, integ));
    }
}
BENCHMARK(BM_RecursionStep)->Arg(1)->Arg(3)->Arg(5);

static void BM_ReduceMatrix(benchmark::State &state) {
    const RecursionMatrix rm = build_matrix();
    for (auto _ : state) {
        Integrator integ;
        benchmark::DoNotOptimize(reduce_matrix(rm, integ));
    }
}
BENCHMARK(BM_ReduceMatrix);

BENCHMARK_MAIN();
