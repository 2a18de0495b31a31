// Microbenchmarks for the inner loops: chord computation, one-dimensional
// chord sampling and full chain steps.

#include <memory>

#include <benchmark/benchmark.h>

#include "hitrun/chains.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/targets.hpp"

using namespace hitrun;

namespace {

ConvexBody body_for(int kind, int n) {
    switch (kind) {
        case 0: return ConvexBody::cube(n, 1.0);
        case 1: return ConvexBody::ball(Vector::Zero(n), 1.0);
        default: return ConvexBody::simplex(n, 1.0);
    }
}

const char* kind_name(int kind) { return kind == 0 ? "cube" : kind == 1 ? "ball" : "simplex"; }

void BM_Chord(benchmark::State& state) {
    const int kind = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const ConvexBody body = body_for(kind, n);
    Rng rng(1);
    const Vector u = uniform_in_body(body, rng);
    Vector theta = uniform_direction(rng, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(chord(body, u, theta));
    }
    state.SetLabel(kind_name(kind));
}
BENCHMARK(BM_Chord)->ArgsProduct({{0, 1, 2}, {2, 16, 64}});

void BM_SampleChordUniform(benchmark::State& state) {
    const ChordLawParams p = UniformSegment{-0.3, 1.7};
    Rng rng(2);
    for (auto _ : state) benchmark::DoNotOptimize(sample_chord(p, rng));
}
BENCHMARK(BM_SampleChordUniform);

// Truncated normal on [a, b] with the window placed in the body, the shoulder
// and the far tail of the Gaussian.
void BM_SampleChordTruncatedNormal(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    const ChordLawParams p = TruncGauss1D{0.0, 1.0, a, a + 1.0, 0.0};
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(sample_chord(p, rng));
}
BENCHMARK(BM_SampleChordTruncatedNormal)->Arg(-1)->Arg(2)->Arg(8)->Arg(30);

void BM_HitAndRunStep(benchmark::State& state) {
    const int kind = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const bool gaussian = state.range(2) != 0;
    auto body = std::make_shared<const ConvexBody>(body_for(kind, n));
    const Target target = gaussian ? Target::truncated_gaussian(body, body->center(), n) : Target::uniform(body);
    Rng rng(4);
    Vector x = body->center();
    for (auto _ : state) {
        x = hit_and_run_step(x, target, rng).x;
        benchmark::DoNotOptimize(x.data());
    }
    state.SetLabel(std::string(kind_name(kind)) + (gaussian ? " truncated gaussian" : " uniform"));
}
BENCHMARK(BM_HitAndRunStep)->ArgsProduct({{0, 1, 2}, {2, 16, 64}, {0, 1}});

void BM_BallWalkStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto body = std::make_shared<const ConvexBody>(ConvexBody::cube(n, 1.0));
    const Target target = Target::uniform(body);
    Rng rng(5);
    Vector x = Vector::Zero(n);
    const double delta = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto _ : state) {
        x = ball_walk_step(x, target, delta, rng).x;
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_BallWalkStep)->Arg(2)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
