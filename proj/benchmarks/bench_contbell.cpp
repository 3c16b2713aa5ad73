#include <benchmark/benchmark.h>

#include "contbell/bell.hpp"
#include "contbell/montecarlo.hpp"
#include "contbell/scenarios.hpp"
#include "contbell/tomography.hpp"

using namespace contbell;

static void BM_AngleSampler(benchmark::State& state) {
    const auto profile = standin_z_profile();
    const AngleSampler sampler(profile.space(), profile.plus());
    RandomStream rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_AngleSampler);

static void BM_JointSpectrum(benchmark::State& state) {
    const auto space = OutcomeSpace::continuous(0.0, 180.0, static_cast<std::size_t>(state.range(0)));
    const auto z = standin_z_profile(space);
    const auto zpx = gaussian_profile(settings::z_plus_x(), 30.0, 150.0, 40.0, space);
    const auto rho = werner_state(0.8);
    for (auto _ : state) benchmark::DoNotOptimize(joint_spectrum(rho, z, zpx).density.data());
}
BENCHMARK(BM_JointSpectrum)->Arg(181)->Arg(1801)->Unit(benchmark::kMillisecond);

static void BM_CorrelationFromSpectrum(benchmark::State& state) {
    const auto z = standin_z_profile();
    const auto zpx = default_profile("ZpX");
    const auto joint = joint_spectrum(werner_state(1.0), z, zpx);
    const auto a1 = build_aux(z);
    const auto a2 = build_aux(zpx);
    for (auto _ : state) benchmark::DoNotOptimize(correlation_from_spectrum(joint, a1, a2));
}
BENCHMARK(BM_CorrelationFromSpectrum)->Unit(benchmark::kMillisecond);

static void BM_RunExperiment(benchmark::State& state) {
    SimConfig sim = make_sim_config(werner_state(1.0), ChannelLabels{}, ProfileLibrary{});
    sim.n_pairs = static_cast<std::uint64_t>(state.range(0));
    sim.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(sim).n_pairs());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunExperiment)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_FitDiagonal(benchmark::State& state) {
    const auto z = standin_z_profile();
    const auto joint = joint_spectrum(werner_state(0.6), z, z);
    for (auto _ : state) benchmark::DoNotOptimize(fit_diagonal(joint.density, z, z).residual);
}
BENCHMARK(BM_FitDiagonal)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
