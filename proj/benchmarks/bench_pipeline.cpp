#include <benchmark/benchmark.h>

#include "stokescut/verification.hpp"

using namespace stokescut;

static void BM_Classify(benchmark::State &state) {
    const ManufacturedCase mc = make_case(CaseId::example1_continuous);
    const int nx = static_cast<int>(state.range(0));
    const TriMesh coarse = build_structured_mesh(mc.domain, nx / 2, nx / 2);
    auto [fine, ref] = uniform_refine(coarse);
    for (auto _ : state) {
        auto cls = classify(fine, mc.levelset);
        benchmark::DoNotOptimize(cls.K_Gamma.size());
    }
}
BENCHMARK(BM_Classify)->Arg(32)->Arg(64);

static void BM_Assemble(benchmark::State &state) {
    const ManufacturedCase mc = make_case(CaseId::example1_continuous);
    auto disc = build_discretization(mc, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto sys = assemble_system(disc->pair(), mc.config);
        benchmark::DoNotOptimize(sys.matrix.nonZeros());
    }
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32);

static void BM_Solve(benchmark::State &state) {
    const ManufacturedCase mc = make_case(CaseId::example1_continuous);
    auto disc = build_discretization(mc, static_cast<int>(state.range(0)));
    const auto sys = assemble_system(disc->pair(), mc.config);
    for (auto _ : state) {
        auto sol = solve_direct(sys);
        benchmark::DoNotOptimize(sol.residual_norm);
    }
}
BENCHMARK(BM_Solve)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
