#pragma once

#include <cstdint>

#include "motion_barcode/video_io.hpp"

namespace motion_barcode {

/// Parameters of the sample-based background model.
struct BackgroundModelParams {
  int samples_per_pixel = 20;
  int match_radius = 20;   // absolute intensity difference counted as a match
  int min_matches = 2;     // matches needed to call a pixel background
  int subsample_factor = 16;  // each refresh fires with probability 1/subsample_factor
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Random stream identifiers of the background model. Exposed so that tests can
// replay the exact same draws.
namespace vibe_stream {
inline constexpr std::uint64_t kInitNeighbor = 0x100;  // + sample index
inline constexpr std::uint64_t kSelfCoin = 1;
inline constexpr std::uint64_t kSelfSlot = 2;
inline constexpr std::uint64_t kNeighborCoin = 3;
inline constexpr std::uint64_t kNeighborPick = 4;
inline constexpr std::uint64_t kNeighborSlot = 5;
}  // namespace vibe_stream

/// Sample-based background subtraction.
///
/// Each pixel keeps `samples_per_pixel` intensity samples. The first
/// `min_matches` slots are seeded with the pixel's own frame-0 value, the rest
/// with values of random in-bounds 8-neighbours of frame 0. A pixel is
/// background when at least `min_matches` samples lie within `match_radius`.
/// Background pixels overwrite one of their own samples with probability
/// 1/subsample_factor, and one neighbour-seeded slot of a random 8-neighbour
/// with the same probability. Frame 0 is all background.
///
/// Every frame is classified against the model left by the previous frame;
/// own refreshes are then applied, followed by neighbour refreshes in raster
/// order. All draws come from counter_hash(seed, x, y, t, stream), so the
/// result does not depend on traversal order.
MotionMaskSequence detect_motion(const FrameSequence& frames, const BackgroundModelParams& params);

/// mask_t(x,y) = |I_t(x,y) - I_{t-1}(x,y)| > threshold; mask_0 is all zero.
MotionMaskSequence detect_motion_framediff(const FrameSequence& frames, int threshold);

}  // namespace motion_barcode
