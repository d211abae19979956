#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>

#include "motion_barcode/barcode.hpp"
#include "motion_barcode/motion_detection.hpp"
#include "motion_barcode/pooling.hpp"
#include "motion_barcode/segmentation.hpp"
#include "motion_barcode/similarity.hpp"
#include "motion_barcode/synth.hpp"

namespace mb = motion_barcode;

namespace {

struct Fixture {
  mb::MotionMaskSequence masks_a, masks_b;
  mb::ClipSignature sig_a, sig_b;
  mb::FrameSequence frames;
};

// Two views of one synthetic scene, 300 frames, default signature settings.
const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    mb::SceneGenParams gen;
    gen.duration = 300;
    const auto scene = mb::random_scene(11, gen);
    const auto va = mb::make_view(scene, 0.0, 1, 0.02, 0.0);
    const auto vb = mb::make_view(scene, 40.0, 2, 0.02, 0.0);
    out.masks_a = mb::render_view(scene, va, "a");
    out.masks_b = mb::render_view(scene, vb, "b");
    out.sig_a = mb::signature_from_masks(out.masks_a);
    out.sig_b = mb::signature_from_masks(out.masks_b);
    out.frames = mb::render_view_frames(scene, va, "a");
    return out;
  }();
  return f;
}

// K random barcodes of length N, half the bits set.
mb::ClipSignature random_signature(std::size_t k, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  mb::ClipSignature s;
  s.clip_id = "r" + std::to_string(seed);
  s.frame_count = n;
  s.region_count = k;
  for (std::size_t i = 0; i < k; ++i) {
    mb::MotionBarcode b(n, static_cast<std::int32_t>(i));
    for (std::size_t t = 0; t < n; ++t) b.set(t, (rng() & 1) != 0);
    s.barcodes.push_back(std::move(b));
  }
  return s;
}

void BM_Correlation(benchmark::State& state) {
  const auto& f = fixture();
  const auto& a = f.sig_a.barcodes.front();
  const auto& b = f.sig_b.barcodes.front();
  for (auto _ : state) benchmark::DoNotOptimize(mb::correlation(a, b));
}
BENCHMARK(BM_Correlation);

void BM_HeuristicSimilarity(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(mb::heuristic_similarity(f.sig_a, f.sig_b));
  state.counters["pairs"] = static_cast<double>(f.sig_a.size() * f.sig_b.size());
}
BENCHMARK(BM_HeuristicSimilarity)->Unit(benchmark::kMillisecond);

void BM_AssignmentSimilarity(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(mb::assignment_similarity(f.sig_a, f.sig_b));
}
BENCHMARK(BM_AssignmentSimilarity)->Unit(benchmark::kMillisecond);

void BM_HeuristicRandom(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto a = random_signature(k, 1000, 1), b = random_signature(k, 1000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mb::heuristic_similarity(a, b));
}
BENCHMARK(BM_HeuristicRandom)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AssignmentRandom(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto a = random_signature(k, 1000, 1), b = random_signature(k, 1000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mb::assignment_similarity(a, b));
}
BENCHMARK(BM_AssignmentRandom)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Slic(benchmark::State& state) {
  const auto image = mb::compute_motion_image(fixture().masks_a);
  mb::SlicParams params;
  params.target_regions = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mb::slic_segment(image, params));
}
BENCHMARK(BM_Slic)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BackgroundModel(benchmark::State& state) {
  const auto& frames = fixture().frames;
  for (auto _ : state) benchmark::DoNotOptimize(mb::detect_motion(frames, mb::BackgroundModelParams{}));
  state.counters["frames/s"] =
      benchmark::Counter(static_cast<double>(frames.frames.size()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_BackgroundModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
