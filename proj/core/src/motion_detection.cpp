#include "motion_barcode/motion_detection.hpp"

#include <array>
#include <cstdlib>
#include <vector>

#include "motion_barcode/errors.hpp"
#include "motion_barcode/rng.hpp"

namespace motion_barcode {

namespace {

constexpr std::array<std::array<int, 2>, 8> kNeighbors = {{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

// In-bounds 8-neighbours of (x, y), in kNeighbors order.
int valid_neighbors(int x, int y, int width, int height, std::array<int, 8>& out) {
  int n = 0;
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kNeighbors[k][0];
    const int ny = y + kNeighbors[k][1];
    if (nx >= 0 && ny >= 0 && nx < width && ny < height) out[n++] = ny * width + nx;
  }
  return n;
}

}  // namespace

void BackgroundModelParams::validate() const {
  if (min_matches < 1) throw InvalidArgument("min_matches must be >= 1");
  if (samples_per_pixel < min_matches) throw InvalidArgument("samples_per_pixel must be >= min_matches");
  if (match_radius < 0) throw InvalidArgument("match_radius must be >= 0");
  if (subsample_factor < 1) throw InvalidArgument("subsample_factor must be >= 1");
}

MotionMaskSequence detect_motion(const FrameSequence& frames, const BackgroundModelParams& params) {
  validate(frames);
  params.validate();

  const int width = frames.width;
  const int height = frames.height;
  const std::size_t pixels = frames.pixel_count();
  const auto slots = static_cast<std::size_t>(params.samples_per_pixel);
  const auto own_slots = static_cast<std::size_t>(params.min_matches);
  const auto shared_slots = static_cast<std::uint32_t>(slots - own_slots);
  const std::uint64_t seed = params.rng_seed;
  const auto factor = static_cast<std::uint32_t>(params.subsample_factor);

  // samples[p * slots + k]
  std::vector<std::uint8_t> samples(pixels * slots);
  std::array<int, 8> nbr{};
  const auto& first = frames.frames[0];
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * width + x;
      const int n = valid_neighbors(x, y, width, height, nbr);
      for (std::size_t k = 0; k < slots; ++k) {
        if (k < own_slots || n == 0) {
          samples[p * slots + k] = first[p];
        } else {
          const auto h = counter_hash(seed, x, y, 0, vibe_stream::kInitNeighbor + k);
          samples[p * slots + k] = first[nbr[hash_below(h, static_cast<std::uint32_t>(n))]];
        }
      }
    }
  }

  MotionMaskSequence out;
  out.width = width;
  out.height = height;
  out.clip_id = frames.clip_id;
  out.masks.assign(frames.frame_count(), std::vector<std::uint8_t>(pixels, 0));

  for (std::size_t t = 1; t < frames.frame_count(); ++t) {
    const auto& frame = frames.frames[t];
    auto& mask = out.masks[t];

    for (std::size_t p = 0; p < pixels; ++p) {
      const int value = frame[p];
      int matches = 0;
      for (std::size_t k = 0; k < slots && matches < params.min_matches; ++k) {
        if (std::abs(value - samples[p * slots + k]) <= params.match_radius) ++matches;
      }
      mask[p] = matches < params.min_matches ? 1 : 0;
    }

    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        if (mask[p]) continue;
        if (hash_below(counter_hash(seed, x, y, t, vibe_stream::kSelfCoin), factor) == 0) {
          const auto slot =
              hash_below(counter_hash(seed, x, y, t, vibe_stream::kSelfSlot), static_cast<std::uint32_t>(slots));
          samples[p * slots + slot] = frame[p];
        }
      }
    }

    if (shared_slots == 0) continue;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        if (mask[p]) continue;
        if (hash_below(counter_hash(seed, x, y, t, vibe_stream::kNeighborCoin), factor) != 0) continue;
        const int n = valid_neighbors(x, y, width, height, nbr);
        if (n == 0) continue;
        const auto q = static_cast<std::size_t>(
            nbr[hash_below(counter_hash(seed, x, y, t, vibe_stream::kNeighborPick), static_cast<std::uint32_t>(n))]);
        const auto slot = own_slots + hash_below(counter_hash(seed, x, y, t, vibe_stream::kNeighborSlot), shared_slots);
        samples[q * slots + slot] = frame[p];
      }
    }
  }
  return out;
}

MotionMaskSequence detect_motion_framediff(const FrameSequence& frames, int threshold) {
  validate(frames);
  MotionMaskSequence out;
  out.width = frames.width;
  out.height = frames.height;
  out.clip_id = frames.clip_id;
  out.masks.assign(frames.frame_count(), std::vector<std::uint8_t>(frames.pixel_count(), 0));
  for (std::size_t t = 1; t < frames.frame_count(); ++t) {
    const auto& prev = frames.frames[t - 1];
    const auto& cur = frames.frames[t];
    for (std::size_t p = 0; p < cur.size(); ++p) {
      out.masks[t][p] = std::abs(int(cur[p]) - int(prev[p])) > threshold ? 1 : 0;
    }
  }
  return out;
}

}  // namespace motion_barcode
