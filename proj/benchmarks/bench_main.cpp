#include <benchmark/benchmark.h>

#include "kfplab/barriers.hpp"
#include "kfplab/certifier.hpp"
#include "kfplab/rng.hpp"
#include "kfplab/solver.hpp"
#include "kfplab/special_functions.hpp"

using namespace kfplab;

static void BM_GaugeCompose(benchmark::State& state) {
    const PhasePoint a(0.3, {0.1, -0.2}, {0.4, 0.5});
    const PhasePoint b(-0.2, {0.7, 0.1}, {-0.3, 0.2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(gauge(compose(a, b)));
    }
}
BENCHMARK(BM_GaugeCompose);

static void BM_PsiExact(benchmark::State& state) {
    double x = -0.31, v = 0.42;
    for (auto _ : state) {
        benchmark::DoNotOptimize(psi_exact(x, v));
        v = -v;
    }
}
BENCHMARK(BM_PsiExact);

static void BM_TricomiU(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tricomi_u(-1.0 / 6.0, 2.0 / 3.0, x));
    }
}
BENCHMARK(BM_TricomiU)->Arg(1)->Arg(10)->Arg(200);

static void BM_CertifySamples(benchmark::State& state) {
    CertifyOptions opts;
    opts.n_samples = static_cast<std::size_t>(state.range(0));
    opts.seed = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify_lemma("barrier-ss", 1e-5, -0.5, opts));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CertifySamples)->Arg(1000)->Arg(10000);

static void BM_SolveStep(benchmark::State& state) {
    HalfSpaceGrid g;
    g.X = 1.0; g.V = 2.0; g.T0 = -0.01;
    g.n_x = static_cast<std::size_t>(state.range(0));
    g.n_v = g.n_x;
    g.n_t = 10;
    CoefficientField cf = make_coefficients("velocity-affine");
    const BoundaryData bd = make_boundary_data("bump", g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_grid(g, cf, bd));
    }
    state.SetItemsProcessed(state.iterations() * 10 * (g.n_x + 1) * (g.n_v + 1));
}
BENCHMARK(BM_SolveStep)->Arg(64)->Arg(256);

static void BM_McParticles(benchmark::State& state) {
    HalfSpaceGrid g;
    g.X = 0.5; g.V = 1.5; g.T0 = -0.1;
    g.n_x = 32; g.n_v = 32; g.n_t = 100;
    CoefficientField cf = make_coefficients("constant");
    const BoundaryData bd = make_boundary_data("one", g);
    const std::vector<PhasePoint> pts{PhasePoint(0.0, -0.2, -0.4)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_mc(pts, cf, g, bd, static_cast<std::size_t>(state.range(0)), 3, 1e-3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McParticles)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
