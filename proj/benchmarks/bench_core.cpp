#include <benchmark/benchmark.h>

#include <random>

#include "unmix/unmix.hpp"

namespace {

using namespace unmix;

constexpr int kW = 128, kH = 96;

PlanarImage random_image(std::uint64_t seed, int w = kW, int h = kH, int c = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> samples(static_cast<std::size_t>(w) * h * c);
    for (double& v : samples) v = uni(rng);
    return PlanarImage::from_data(w, h, c, std::move(samples));
}

DisparityMap random_disparity(std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    DisparityMap d(kW, kH);
    for (double& v : d.values) v = uni(rng);
    return d;
}

void BM_WarpFromRight(benchmark::State& state) {
    PlanarImage img = random_image(1);
    DisparityMap d = random_disparity(2, 0.0, 8.0);
    for (auto _ : state) benchmark::DoNotOptimize(warp_from_right(img, d));
}
BENCHMARK(BM_WarpFromRight)->Unit(benchmark::kMicrosecond);

void BM_WarpAdjoint(benchmark::State& state) {
    PlanarImage img = random_image(3);
    DisparityMap d = random_disparity(4, 0.0, 8.0);
    WarpResult res = warp_from_right(img, d);
    Field up(kW, kH, 3);
    std::fill(up.data.begin(), up.data.end(), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(warp_adjoint(res, up));
}
BENCHMARK(BM_WarpAdjoint)->Unit(benchmark::kMicrosecond);

void BM_SsimMap(benchmark::State& state) {
    PlanarImage a = random_image(5), b = random_image(6);
    for (auto _ : state) benchmark::DoNotOptimize(ssim_map(a, b));
}
BENCHMARK(BM_SsimMap)->Unit(benchmark::kMicrosecond);

void BM_AppearanceLoss(benchmark::State& state) {
    LossWeights w;
    PlanarImage a = random_image(7), b = random_image(8);
    for (auto _ : state) benchmark::DoNotOptimize(appearance_loss_full(a, b, w));
}
BENCHMARK(BM_AppearanceLoss)->Unit(benchmark::kMicrosecond);

void BM_SmoothnessLoss(benchmark::State& state) {
    PlanarImage img = random_image(9);
    DisparityMap d = random_disparity(10, 0.0, 8.0);
    for (auto _ : state) benchmark::DoNotOptimize(smoothness_loss_full(d, img));
}
BENCHMARK(BM_SmoothnessLoss)->Unit(benchmark::kMicrosecond);

void BM_TotalLoss(benchmark::State& state) {
    LossWeights w;
    PlanarImage left = random_image(11), right = random_image(12);
    PlanarImage mix = compose(MixtureOperator{MixtureKind::Anaglyph}, left, right);
    DisparityMap dl = random_disparity(13, 0.0, 6.0);
    DisparityMap dr = random_disparity(14, 0.0, 6.0);
    MixtureOperator op{MixtureKind::Anaglyph};
    for (auto _ : state)
        benchmark::DoNotOptimize(total_loss(left, right, dl, dr, mix, op, w));
}
BENCHMARK(BM_TotalLoss)->Unit(benchmark::kMillisecond);

void BM_CostVolume(benchmark::State& state) {
    LossWeights w;
    PlanarImage left = random_image(15), right = random_image(16);
    int d_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_cost_volume(left, right, d_max, w));
}
BENCHMARK(BM_CostVolume)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_WtaDisparity(benchmark::State& state) {
    LossWeights w;
    PlanarImage left = random_image(17), right = random_image(18);
    CostVolume cv = build_cost_volume(left, right, 32, w);
    for (auto _ : state) benchmark::DoNotOptimize(wta_disparity(cv));
}
BENCHMARK(BM_WtaDisparity)->Unit(benchmark::kMicrosecond);

void BM_SolverStep(benchmark::State& state) {
    MixtureOperator op{MixtureKind::Anaglyph};
    PlanarImage left = random_image(19), right = random_image(20);
    PlanarImage mix = compose(op, left, right);
    SolverConfig cfg;
    cfg.levels = 1;
    cfg.d_max = 8;
    LatentState st = init_state(mix, op, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(step(st, mix, op, cfg));
}
BENCHMARK(BM_SolverStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
