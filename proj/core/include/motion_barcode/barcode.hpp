#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motion_barcode/video_io.hpp"

namespace motion_barcode {

/// N-bit record of motion existence over time, packed 64 bits per word.
/// source_id is a pixel index (y*width + x) or a superpixel label.
class MotionBarcode {
 public:
  MotionBarcode() = default;
  explicit MotionBarcode(std::size_t length, std::int64_t source_id = -1);

  /// Parses a string of '0'/'1' characters. Throws InvalidArgument otherwise.
  static MotionBarcode from_string(std::string_view bits, std::int64_t source_id = -1);

  std::size_t size() const noexcept { return size_; }
  std::size_t ones_count() const noexcept { return ones_; }
  std::int64_t source_id() const noexcept { return source_id_; }
  void set_source_id(std::int64_t id) noexcept { source_id_ = id; }

  bool test(std::size_t t) const noexcept { return (words_[t >> 6] >> (t & 63)) & 1U; }
  void set(std::size_t t, bool value) noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// First `length` bits; same source id.
  MotionBarcode prefix(std::size_t length) const;

  std::string to_string() const;

  friend bool operator==(const MotionBarcode& a, const MotionBarcode& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
  std::int64_t source_id_ = -1;
};

/// Number of positions where both barcodes are 1. Lengths must match.
std::size_t count_common_ones(const MotionBarcode& a, const MotionBarcode& b) noexcept;

/// Per-pixel count of motion frames.
struct MotionImage {
  int width = 0;
  int height = 0;
  std::size_t frame_count = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(int x, int y) const { return counts[static_cast<std::size_t>(y) * width + x]; }
};

MotionImage compute_motion_image(const MotionMaskSequence& masks);

/// Barcode of one pixel. Throws InvalidArgument for out-of-bounds coordinates.
MotionBarcode barcode_at(const MotionMaskSequence& masks, int x, int y);

/// Keeps barcodes with ones_count > min_motion_fraction * N (strict), in
/// input order.
std::vector<MotionBarcode> filter_barcodes(std::span<const MotionBarcode> barcodes,
                                           double min_motion_fraction);

/// True when a clip has at least `min_barcodes` informative barcodes.
constexpr bool sufficient_motion(std::size_t signature_size, std::size_t min_barcodes = 100) noexcept {
  return signature_size >= min_barcodes;
}

}  // namespace motion_barcode
