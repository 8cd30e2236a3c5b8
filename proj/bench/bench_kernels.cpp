// Serial reference vs OpenMP kernels.
//
//   ./logitcal_bench --benchmark_counters_tabular=true

#include <random>

#include <benchmark/benchmark.h>

#include "logitcal/bilateral.hpp"
#include "logitcal/parallel.hpp"
#include "logitcal/scoring.hpp"
#include "logitcal/synth.hpp"

using namespace logitcal;

namespace {

struct ScoringFixture {
    std::vector<DetectionRecord> test;
    DensityModel model;
    ScoringConfig cfg;

    explicit ScoringFixture(int n) {
        SyntheticSpec spec;
        model = fit_model(training_from_detections(generate_synthetic(spec).records), 24);
        spec.n_tp = spec.n_fp = n / 2;
        spec.seed = 7;
        test = generate_synthetic(spec).records;
        cfg.method = Method::map;
        cfg.bins = 24;
        cfg.lambda = 1e-8;
    }
};

// KITTI-sized range view with roughly 6% of pixels hit by the scan.
SparseMap kitti_sparse() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SparseMap m(1242, 375);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (u(rng) < 0.06) m.set(x, y, 5.0 + 75.0 * u(rng));
    return m;
}

void BM_score_serial(benchmark::State& state) {
    ScoringFixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(score_all_serial(f.test, &f.model, f.cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_score_parallel(benchmark::State& state) {
    ScoringFixture f(static_cast<int>(state.range(0)));
    state.counters["threads"] = max_threads();
    for (auto _ : state) benchmark::DoNotOptimize(score_all(f.test, &f.model, f.cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_bilateral_serial(benchmark::State& state) {
    auto m = kitti_sparse();
    BilateralOptions opts{static_cast<int>(state.range(0)), true, 1};
    for (auto _ : state) benchmark::DoNotOptimize(bilateral_upsample_serial(m, opts));
}

void BM_bilateral_parallel(benchmark::State& state) {
    auto m = kitti_sparse();
    BilateralOptions opts{static_cast<int>(state.range(0)), true, 1};
    state.counters["threads"] = max_threads();
    for (auto _ : state) benchmark::DoNotOptimize(bilateral_upsample(m, opts));
}

}  // namespace

BENCHMARK(BM_score_serial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_parallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bilateral_serial)->Arg(5)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bilateral_parallel)->Arg(5)->Arg(13)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
