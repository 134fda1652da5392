#include <benchmark/benchmark.h>

#include <random>

#include "partskel/fusion.hpp"
#include "partskel/renderer.hpp"
#include "partskel/synth.hpp"

using namespace partskel;

namespace {

const Size kCanvas{128, 88};

SynthClip walker() {
    return generate_clip(sample_identities(1, 0).front(), 16, 1, Condition::Normal, kNoisyOptions);
}

void BM_RasterizeCircle(benchmark::State& state) {
    const double r = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_circle({44.3, 20.7}, r, kCanvas));
}
BENCHMARK(BM_RasterizeCircle)->Arg(3)->Arg(10)->Arg(20);

void BM_RasterizeCapsule(benchmark::State& state) {
    const double w = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_segment({30.2, 40.1}, {52.8, 95.4}, w, kCanvas));
}
BENCHMARK(BM_RasterizeCapsule)->Arg(3)->Arg(12)->Arg(24);

void BM_RenderSkeleton(benchmark::State& state) {
    const auto clip = walker();
    const auto mapping = PartMapping::coco17();
    const RenderConfig cfg{10.0, 12.0, 0.3, kCanvas};
    LabelRaster out(kCanvas);
    std::size_t i = 0;
    for (auto _ : state) {
        render_parsing_skeleton(clip.frames[i++ % clip.frames.size()], mapping, cfg, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_RenderSkeleton);

void BM_Fuse(benchmark::State& state) {
    const auto strategy = state.range(0) == 0 ? Strategy::Crf : Strategy::Dcf;
    const auto clip = walker();
    const auto parsing = render_parsing_skeleton(clip.frames[0], PartMapping::coco17(), RenderConfig{10.0, 12.0, 0.3, kCanvas});
    for (auto _ : state) benchmark::DoNotOptimize(fuse(parsing, clip.silhouettes[0], strategy));
}
BENCHMARK(BM_Fuse)->Arg(0)->Arg(1);

void BM_ResizeLabels(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> cls(0, 12);
    LabelRaster src(kCanvas);
    for (auto& v : src.labels()) v = static_cast<ClassId>(cls(rng));
    for (auto _ : state) benchmark::DoNotOptimize(resize_labels(src));
}
BENCHMARK(BM_ResizeLabels);

}  // namespace

BENCHMARK_MAIN();
