#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "pw/guidance.hpp"
#include "pw/hamiltonian.hpp"
#include "pw/schrodinger.hpp"

using namespace pw;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexLatticeField packet(const GridSpec& g) {
    const double x0 = g.length(0) / 2.0;
    auto f = ComplexLatticeField::sampled(g, [&](double x, double) {
        const double u = x - x0;
        return std::exp(cplx(-u * u / 2.0, 2.0 * u));
    });
    f.scale(1.0 / f.norm());
    return f;
}

}  // namespace

static void BM_LaplacianFD(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto f = packet(g);
    for (auto _ : state) benchmark::DoNotOptimize(laplacian(f, DerivMethod::FiniteDifference));
}
BENCHMARK(BM_LaplacianFD)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_LaplacianSpectral(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto f = packet(g);
    for (auto _ : state) benchmark::DoNotOptimize(laplacian(f, DerivMethod::Spectral));
}
BENCHMARK(BM_LaplacianSpectral)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_CrankNicolsonStep(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto psi = packet(g);
    CrankNicolsonSolver solver(g, Potential(g), 1e-4);
    for (auto _ : state) solver.step(psi);
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SplitStep(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto psi = packet(g);
    Potential v(g);
    for (auto _ : state) {
        psi = step_split_step(psi, v, 1e-4);
        benchmark::DoNotOptimize(psi);
    }
}
BENCHMARK(BM_SplitStep)->Arg(64)->Arg(256)->Arg(1024);

static void BM_RK4ExtendedStep(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto s = FieldPhaseSpaceState::on_constraint(packet(g), 1.0);
    HamiltonianSpec h{Potential(g)};
    const double dt = 0.25 * rk4_stability_bound(g, 1.0, 1.0);
    for (auto _ : state) {
        auto traj = evolve_extended(s, h, dt, 1);
        benchmark::DoNotOptimize(traj.states.back());
    }
}
BENCHMARK(BM_RK4ExtendedStep)->Arg(64)->Arg(256);

static void BM_VelocityField(benchmark::State& state) {
    auto g = GridSpec::line(static_cast<int>(state.range(0)), 40.0);
    auto psi = packet(g);
    for (auto _ : state) benchmark::DoNotOptimize(velocity_field(psi));
}
BENCHMARK(BM_VelocityField)->Arg(256)->Arg(1024);

static void BM_TrajectoryStep(benchmark::State& state) {
    auto g = GridSpec::line(256, 40.0);
    auto psi = packet(g);
    FrameSet frames;
    frames.times = {0.0, 1.0};
    frames.frames = {velocity_field(psi), velocity_field(psi)};
    for (auto _ : state) {
        auto tr = integrate_trajectory(frames, {20.0, 0.0}, 0.5);
        benchmark::DoNotOptimize(tr.points.back());
    }
}
BENCHMARK(BM_TrajectoryStep);

BENCHMARK_MAIN();
