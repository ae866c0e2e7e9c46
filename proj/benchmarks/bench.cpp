#include <benchmark/benchmark.h>

#include "ocp2d/equilibrium.hpp"
#include "ocp2d/kernel.hpp"
#include "ocp2d/sampler.hpp"

using namespace ocp2d;

namespace {

Configuration random_config(int N, std::uint64_t seed) {
    Rng rng(seed);
    Configuration c;
    for (int k = 0; k < N; ++k)
        c.points.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    return c;
}

void bm_log_kernel(benchmark::State& state) {
    Rng rng(1);
    const PlanePoint z{rng.uniform(), rng.uniform()}, w{rng.uniform() + 1.0, rng.uniform()};
    for (auto _ : state) benchmark::DoNotOptimize(log_kernel(z, w));
}
BENCHMARK(bm_log_kernel);

void bm_smoothed_log(benchmark::State& state) {
    Rng rng(2);
    const PlanePoint z{rng.uniform(), rng.uniform()};
    for (auto _ : state) benchmark::DoNotOptimize(smoothed_log(z, 0.5));
}
BENCHMARK(bm_smoothed_log);

void bm_energy_delta_move(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const Potential V = Potential::quadratic();
    const Configuration c = random_config(N, 3);
    Rng rng(4);
    for (auto _ : state) {
        const int j = static_cast<int>(rng.below(N));
        const PlanePoint to{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        benchmark::DoNotOptimize(energy_delta_move(c, j, to, V, N));
    }
    state.SetComplexityN(N);
}
BENCHMARK(bm_energy_delta_move)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void bm_total_energy(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const Potential V = Potential::quadratic();
    const Configuration c = random_config(N, 5);
    for (auto _ : state) benchmark::DoNotOptimize(total_energy(c, V, N));
    state.SetComplexityN(N);
}
BENCHMARK(bm_total_energy)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void bm_mcmc_sweep(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    GasParams params{N, 1.0, Potential::quadratic()};
    const RadialEquilibrium eq = solve_equilibrium_radial(params.potential);
    ChainConfig chain;
    chain.steps = 1;
    chain.burn_in = 0;
    chain.thinning = 1;
    chain.seed = 6;
    for (auto _ : state) benchmark::DoNotOptimize(run_chain(params, chain, eq));
    state.SetComplexityN(N);
}
BENCHMARK(bm_mcmc_sweep)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void bm_obstacle_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridSpec g({0, 0}, 2.0, n);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_obstacle(Potential::quadratic(), g));
}
BENCHMARK(bm_obstacle_solve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

} // namespace
