#include "motion_barcode/barcode.hpp"

#include <bit>

#include "motion_barcode/errors.hpp"

#if defined(__x86_64__) && defined(__ELF__) && (defined(__GNUC__) || defined(__clang__))
#define MB_POPCOUNT_CLONES __attribute__((target_clones("popcnt", "default")))
#else
#define MB_POPCOUNT_CLONES
#endif

namespace motion_barcode {

MotionBarcode::MotionBarcode(std::size_t length, std::int64_t source_id)
    : words_((length + 63) / 64, 0), size_(length), source_id_(source_id) {}

MotionBarcode MotionBarcode::from_string(std::string_view bits, std::int64_t source_id) {
  MotionBarcode b(bits.size(), source_id);
  for (std::size_t t = 0; t < bits.size(); ++t) {
    if (bits[t] == '1') {
      b.set(t, true);
    } else if (bits[t] != '0') {
      throw InvalidArgument("barcode string may only contain '0' and '1'");
    }
  }
  return b;
}

void MotionBarcode::set(std::size_t t, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (t & 63);
  std::uint64_t& w = words_[t >> 6];
  const bool old = (w & bit) != 0;
  if (old == value) return;
  if (value) {
    w |= bit;
    ++ones_;
  } else {
    w &= ~bit;
    --ones_;
  }
}

MotionBarcode MotionBarcode::prefix(std::size_t length) const {
  if (length > size_) throw InvalidArgument("prefix length exceeds barcode length");
  MotionBarcode out(length, source_id_);
  const std::size_t full = length / 64;
  for (std::size_t i = 0; i < full; ++i) out.words_[i] = words_[i];
  if (length % 64) out.words_[full] = words_[full] & ((std::uint64_t{1} << (length % 64)) - 1);
  for (auto w : out.words_) out.ones_ += static_cast<std::size_t>(std::popcount(w));
  return out;
}

std::string MotionBarcode::to_string() const {
  std::string s(size_, '0');
  for (std::size_t t = 0; t < size_; ++t) {
    if (test(t)) s[t] = '1';
  }
  return s;
}

MB_POPCOUNT_CLONES
std::size_t count_common_ones(const MotionBarcode& a, const MotionBarcode& b) noexcept {
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return n;
}

MotionImage compute_motion_image(const MotionMaskSequence& masks) {
  validate(masks);
  MotionImage image{masks.width, masks.height, masks.frame_count(),
                    std::vector<std::uint32_t>(masks.pixel_count(), 0)};
  for (const auto& mask : masks.masks) {
    for (std::size_t p = 0; p < mask.size(); ++p) image.counts[p] += mask[p];
  }
  return image;
}

MotionBarcode barcode_at(const MotionMaskSequence& masks, int x, int y) {
  if (x < 0 || y < 0 || x >= masks.width || y >= masks.height) {
    throw InvalidArgument("pixel (" + std::to_string(x) + "," + std::to_string(y) + ") out of bounds");
  }
  const std::size_t p = static_cast<std::size_t>(y) * masks.width + x;
  MotionBarcode b(masks.frame_count(), static_cast<std::int64_t>(p));
  for (std::size_t t = 0; t < masks.frame_count(); ++t) {
    if (masks.masks[t][p]) b.set(t, true);
  }
  return b;
}

std::vector<MotionBarcode> filter_barcodes(std::span<const MotionBarcode> barcodes,
                                           double min_motion_fraction) {
  if (!(min_motion_fraction >= 0.0 && min_motion_fraction <= 1.0)) {
    throw InvalidArgument("min_motion_fraction must lie in [0, 1]");
  }
  std::vector<MotionBarcode> kept;
  for (const auto& b : barcodes) {
    if (static_cast<double>(b.ones_count()) > min_motion_fraction * static_cast<double>(b.size())) {
      kept.push_back(b);
    }
  }
  return kept;
}

}  // namespace motion_barcode
