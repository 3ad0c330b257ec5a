#include <benchmark/benchmark.h>

#include "odecond/conditioning.hpp"
#include "odecond/studies.hpp"

using namespace odecond;

namespace {

void BM_IntegrateRk4(benchmark::State& state) {
    const System sys = find_system(state.range(0) == 0 ? "vdp" : "lorenz");
    const double T = 10.0;
    const double h = 1e-3;
    for (auto _ : state) {
        const Trajectory tr = integrate(rk4_tableau(), sys, sys.default_x0, 0.0, T, h);
        benchmark::DoNotOptimize(tr.states.back().front());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(T / h));
}
BENCHMARK(BM_IntegrateRk4)->Arg(0)->Arg(1);

void BM_TransitionSequence(benchmark::State& state) {
    const System sys = find_system(state.range(0) == 0 ? "vdp" : "torus4");
    for (auto _ : state) {
        const TransitionSequence seq =
            transition_sequence(rk4_tableau(), sys, sys.default_x0, 0.0, 10.0, 1e-3);
        benchmark::DoNotOptimize(seq.steps.back()(0, 0));
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_TransitionSequence)->Arg(0)->Arg(1);

void BM_Norm2(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = std::sin(1.0 + i * 3.7 + j * 1.3);
    for (auto _ : state) benchmark::DoNotOptimize(norm2(m));
}
BENCHMARK(BM_Norm2)->Arg(2)->Arg(3)->Arg(4)->Arg(6);

void BM_ConditioningCurve(benchmark::State& state) {
    const System sys = find_system("vdp");
    const TransitionSequence seq =
        transition_sequence(rk4_tableau(), sys, sys.default_x0, 0.0, 20.0, 1e-3);
    const std::vector<double> queries = uniform_queries(0.0, 20.0, 64);
    for (auto _ : state) {
        const ConditioningCurve curve = conditioning_curve(seq, queries);
        benchmark::DoNotOptimize(curve.values.back());
    }
}
BENCHMARK(BM_ConditioningCurve);

void BM_BoundCheck(benchmark::State& state) {
    const System sys = find_system("decay");
    for (auto _ : state) {
        const BoundReport report =
            bound_check(sys, rk4_tableau(), sys.default_x0, 0.0, 10.0, 0.05, 3, 0.01);
        benchmark::DoNotOptimize(report.k_stability);
    }
}
BENCHMARK(BM_BoundCheck);

}  // namespace

BENCHMARK_MAIN();
