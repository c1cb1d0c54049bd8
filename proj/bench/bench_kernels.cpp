// Serial reference against the OpenMP kernels on the hot loops.
#include <benchmark/benchmark.h>

#include "bclab/curvature.hpp"
#include "bclab/measure.hpp"
#include "bclab/tangent.hpp"

using namespace bclab;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_SConcavity(benchmark::State& state) {
    auto s = make_lp(4, 2);
    const CheckOptions opts{exec_of(state), true};
    for (auto _ : state) benchmark::DoNotOptimize(check_s_concavity(*s, {3.0, 0.0, kInf, 2}, 20000, 1, opts));
    label(state);
}

void BM_Busemann(benchmark::State& state) {
    auto s = make_cone(4.0);
    const CheckOptions opts{exec_of(state), true};
    for (auto _ : state)
        benchmark::DoNotOptimize(check_busemann_monotone(*s, BusemannDirection::concave, 10000, 2, opts));
    label(state);
}

void BM_BallVolume(benchmark::State& state) {
    auto s = make_sphere_cap(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_ball_volume(*s, s->base_point(), {0.2, 0.4, 0.8}, 40000, 3, exec_of(state)));
    label(state);
}

void BM_GhExact(benchmark::State& state) {
    auto a = make_euclidean(2);
    auto b = make_lp(4, 2);
    const auto x = FinitePointedSample::from_points(*a, sample_ball(*a, {0, 0}, 1.0, 8, 4), 0);
    const auto y = FinitePointedSample::from_points(*b, sample_ball(*b, {0, 0}, 1.0, 8, 5), 0);
    for (auto _ : state) benchmark::DoNotOptimize(gh_distance_bounds(x, y, 8, exec_of(state)));
    label(state);
}

}  // namespace

BENCHMARK(BM_SConcavity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Busemann)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallVolume)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GhExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
