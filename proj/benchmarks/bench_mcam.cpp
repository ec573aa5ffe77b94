#include <benchmark/benchmark.h>

#include "mcam/affinity.hpp"
#include "mcam/baselines.hpp"
#include "mcam/cluster.hpp"
#include "mcam/pipeline.hpp"
#include "mcam/spectra.hpp"
#include "mcam/synthetic.hpp"

using namespace mcam;

namespace {

Tensor3 bench_tensor(std::size_t n) {
    const auto spec = uniform_block_spec(n, 4, n / 4, 40.0, true, 7);
    return generate(spec).first;
}

void BM_SliceCovariance(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(slice_covariance(t, 1, 0));
    }
}
BENCHMARK(BM_SliceCovariance)->Arg(20)->Arg(40)->Arg(80);

void BM_ModeSpectra(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_mode_spectra(t, 1, 0, 1));
    }
}
BENCHMARK(BM_ModeSpectra)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_AffinityMcam1(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    const ModeSpectra sp = compute_mode_spectra(t, 1, 0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(affinity_mcam1(sp, 2));
    }
}
BENCHMARK(BM_AffinityMcam1)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_AffinityMcam2(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    const ModeSpectra sp = compute_mode_spectra(t, 1, 0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(affinity_mcam2(sp, 2));
    }
}
BENCHMARK(BM_AffinityMcam2)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SpectralClustering(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    const ModeSpectra sp = compute_mode_spectra(t, 1, 0, 1);
    const AffinityMatrix a = affinity_mcam1(sp, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_clustering(a, 4, 1));
    }
}
BENCHMARK(BM_SpectralClustering)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_AffinityPropagation(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    const ModeSpectra sp = compute_mode_spectra(t, 1, 0, 1);
    const AffinityMatrix a = affinity_mcam1(sp, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(affinity_propagation(a));
    }
}
BENCHMARK(BM_AffinityPropagation)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_CpAls(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cp_als(t, 4, 25, 1));
    }
}
BENCHMARK(BM_CpAls)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Hooi(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hooi(t, {4, 4, 4}, 15, 1));
    }
}
BENCHMARK(BM_Hooi)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_EndToEnd(benchmark::State& state) {
    const Tensor3 t = bench_tensor(state.range(0));
    RunConfig cfg;
    cfg.engine = Engine::SC;
    cfg.k = {{4, 4, 4}};
    cfg.seed = 1;
    cfg.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_mcam(t, cfg));
    }
}
BENCHMARK(BM_EndToEnd)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
