#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace motion_barcode {

/// Single 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Time-ordered grayscale frames of one clip. Immutable once loaded.
struct FrameSequence {
  int width = 0;
  int height = 0;
  std::vector<std::vector<std::uint8_t>> frames;
  std::string clip_id;

  std::size_t frame_count() const noexcept { return frames.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// One binary mask per frame; 1 marks motion.
struct MotionMaskSequence {
  int width = 0;
  int height = 0;
  std::vector<std::vector<std::uint8_t>> masks;
  std::string clip_id;

  std::size_t frame_count() const noexcept { return masks.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::uint8_t at(std::size_t t, int x, int y) const {
    return masks[t][static_cast<std::size_t>(y) * width + x];
  }

  friend bool operator==(const MotionMaskSequence&, const MotionMaskSequence&) = default;
};

/// Checks shape invariants; throws InvalidArgument.
void validate(const FrameSequence& frames);
void validate(const MotionMaskSequence& masks);

// Binary PGM (P5, maxval 255). Header comments are accepted on read.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Reads a manifest: one path per non-empty line, relative paths resolved
/// against the manifest's directory.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest_path);

/// Loads the frames listed in a manifest. clip_id is the manifest stem.
FrameSequence load_frame_sequence(const std::filesystem::path& manifest_path);

/// Loads a 0/255 mask sequence. Any other pixel value is rejected.
MotionMaskSequence load_mask_sequence(const std::filesystem::path& manifest_path);

/// Writes frame_%06d.pgm files plus `<clip_id>.txt` (or `masks.txt` / `frames.txt` for an
/// empty id) into `dir`, creating it if needed. Returns the manifest path.
std::filesystem::path write_mask_sequence(const MotionMaskSequence& masks,
                                          const std::filesystem::path& dir);

/// Same layout as write_mask_sequence, for grayscale frames.
std::filesystem::path write_frame_sequence(const FrameSequence& frames,
                                           const std::filesystem::path& dir);

}  // namespace motion_barcode
