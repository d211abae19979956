#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "motion_barcode/barcode.hpp"
#include "motion_barcode/segmentation.hpp"
#include "motion_barcode/video_io.hpp"

namespace motion_barcode {

/// Pooled, filtered barcodes of one clip. Barcodes are sorted by source
/// superpixel label and carry no pixel coordinates.
struct ClipSignature {
  std::string clip_id;
  std::size_t frame_count = 0;
  std::vector<MotionBarcode> barcodes;
  int region_count = 0;  // before filtering
  bool low_motion = false;

  std::size_t size() const noexcept { return barcodes.size(); }
  friend bool operator==(const ClipSignature&, const ClipSignature&) = default;
};

/// Representative barcode of one region: bit t is 1 iff at least half of the
/// region's pixels move at t. This per-bit majority minimises the summed
/// Hamming distance to the region's barcodes.
MotionBarcode pool_superpixel(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels,
                              int label);

/// Pools every region, keeps representatives with more than
/// min_motion_fraction * N ones and flags clips with fewer than min_barcodes.
ClipSignature build_signature(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels,
                              double min_motion_fraction = 0.1, std::size_t min_barcodes = 100);

struct SignatureParams {
  SlicParams slic;
  double min_motion_fraction = 0.1;
  std::size_t min_barcodes = 100;
};

/// compute_motion_image -> slic_segment -> build_signature.
ClipSignature signature_from_masks(const MotionMaskSequence& masks, const SignatureParams& params = {});

// Text format:
//   MBSIG 1 <clip_id> <N> <K_retained> <region_count> <low_motion 0|1>
//   <source_label> <N characters of 0/1>      (K_retained lines, labels increasing)
void write_signature(std::ostream& out, const ClipSignature& sig);
void write_signature_file(const std::filesystem::path& path, const ClipSignature& sig);

/// `source` names the input in error messages.
ClipSignature read_signature(std::istream& in, const std::string& source);
ClipSignature read_signature_file(const std::filesystem::path& path);

/// Reads every *.sig file of a directory, sorted by file name.
std::vector<ClipSignature> read_signature_dir(const std::filesystem::path& dir);

}  // namespace motion_barcode
