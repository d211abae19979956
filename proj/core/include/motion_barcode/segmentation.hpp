#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "motion_barcode/barcode.hpp"

namespace motion_barcode {

/// Partition of an image into regions labelled [0, region_count).
struct SuperpixelLabelMap {
  int width = 0;
  int height = 0;
  int region_count = 0;
  std::vector<std::int32_t> labels;

  std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const SuperpixelLabelMap&, const SuperpixelLabelMap&) = default;
};

struct SlicParams {
  int target_regions = 1000;
  double compactness = 10.0;
  int iterations = 10;
};

/// SLIC on the single-channel motion image.
///
/// Counts are scaled to [0, 100] by 100 / max(1, max count). Centres start at
/// the middle of a grid of cells of side about S = round(sqrt(W*H/K)) (never
/// more than K cells) and move to the lowest-gradient pixel of their 3x3
/// neighbourhood when it is strictly lower than at the start. Each iteration assigns every pixel within
/// a 2S x 2S window of a centre to the centre minimising
/// d_c^2 + (d_s / S)^2 * m^2 (ties to the lower label), then moves centres to
/// their cluster means. Afterwards 4-connected components smaller than
/// (W*H/K)/4 are merged into their largest neighbour and the labels are
/// compacted in raster order of first appearance.
SuperpixelLabelMap slic_segment(const MotionImage& image, const SlicParams& params = {});

/// Lossy 8-bit view of the labels for visual inspection.
void write_label_pgm(const std::filesystem::path& path, const SuperpixelLabelMap& map);

/// Exact interchange: u32 LE width, u32 LE height, then one u32 LE label per
/// pixel in row-major order.
void write_label_raw(const std::filesystem::path& path, const SuperpixelLabelMap& map);
SuperpixelLabelMap read_label_raw(const std::filesystem::path& path);

}  // namespace motion_barcode
