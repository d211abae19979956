#include "motion_barcode/pooling.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "motion_barcode/errors.hpp"

namespace motion_barcode {

namespace {

void check_shapes(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels) {
  if (masks.width != labels.width || masks.height != labels.height ||
      labels.labels.size() != masks.pixel_count()) {
    throw InvalidArgument("mask sequence and label map dimensions differ");
  }
}

// Per-region, per-frame motion pixel counts plus region sizes.
void accumulate(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels,
                std::vector<std::uint32_t>& counts, std::vector<std::uint32_t>& sizes) {
  const std::size_t regions = static_cast<std::size_t>(labels.region_count);
  const std::size_t frames = masks.frame_count();
  counts.assign(regions * frames, 0);
  sizes.assign(regions, 0);
  for (auto l : labels.labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t t = 0; t < frames; ++t) {
    const auto& mask = masks.masks[t];
    for (std::size_t p = 0; p < mask.size(); ++p) {
      if (mask[p]) ++counts[static_cast<std::size_t>(labels.labels[p]) * frames + t];
    }
  }
}

MotionBarcode majority(const std::uint32_t* counts, std::size_t frames, std::uint32_t size, int label) {
  MotionBarcode b(frames, label);
  for (std::size_t t = 0; t < frames; ++t) {
    // count / size >= 1/2, exact halves round up to motion.
    if (2ULL * counts[t] >= size) b.set(t, true);
  }
  return b;
}

}  // namespace

MotionBarcode pool_superpixel(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels, int label) {
  check_shapes(masks, labels);
  if (label < 0 || label >= labels.region_count) throw InvalidArgument("unknown label " + std::to_string(label));
  const std::size_t frames = masks.frame_count();
  std::vector<std::uint32_t> counts(frames, 0);
  std::uint32_t size = 0;
  for (std::size_t p = 0; p < labels.labels.size(); ++p) {
    if (labels.labels[p] != label) continue;
    ++size;
    for (std::size_t t = 0; t < frames; ++t) counts[t] += masks.masks[t][p];
  }
  if (size == 0) throw InvalidArgument("label " + std::to_string(label) + " has no pixels");
  return majority(counts.data(), frames, size, label);
}

ClipSignature build_signature(const MotionMaskSequence& masks, const SuperpixelLabelMap& labels,
                              double min_motion_fraction, std::size_t min_barcodes) {
  check_shapes(masks, labels);
  validate(masks);
  std::vector<std::uint32_t> counts;
  std::vector<std::uint32_t> sizes;
  accumulate(masks, labels, counts, sizes);

  const std::size_t frames = masks.frame_count();
  std::vector<MotionBarcode> pooled;
  pooled.reserve(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) continue;
    pooled.push_back(majority(counts.data() + k * frames, frames, sizes[k], static_cast<int>(k)));
  }

  ClipSignature sig;
  sig.clip_id = masks.clip_id;
  sig.frame_count = frames;
  sig.region_count = labels.region_count;
  sig.barcodes = filter_barcodes(pooled, min_motion_fraction);
  sig.low_motion = !sufficient_motion(sig.barcodes.size(), min_barcodes);
  return sig;
}

ClipSignature signature_from_masks(const MotionMaskSequence& masks, const SignatureParams& params) {
  const auto labels = slic_segment(compute_motion_image(masks), params.slic);
  return build_signature(masks, labels, params.min_motion_fraction, params.min_barcodes);
}

void write_signature(std::ostream& out, const ClipSignature& sig) {
  if (sig.clip_id.empty() || sig.clip_id.find_first_of(" \t\r\n") != std::string::npos) {
    throw InvalidArgument("clip_id must be non-empty and contain no whitespace");
  }
  out << "MBSIG 1 " << sig.clip_id << ' ' << sig.frame_count << ' ' << sig.barcodes.size() << ' '
      << sig.region_count << ' ' << (sig.low_motion ? 1 : 0) << '\n';
  for (const auto& b : sig.barcodes) out << b.source_id() << ' ' << b.to_string() << '\n';
}

void write_signature_file(const std::filesystem::path& path, const ClipSignature& sig) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_signature(out, sig);
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

ClipSignature read_signature(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source, 1, "empty signature file");
  std::istringstream header(line);
  std::string magic, id;
  int version = 0;
  long long n = -1, retained = -1, regions = -1;
  int flag = -1;
  std::string extra;
  if (!(header >> magic >> version >> id >> n >> retained >> regions >> flag) || magic != "MBSIG" ||
      version != 1 || n < 1 || retained < 0 || regions < 0 || (flag != 0 && flag != 1) ||
      (header >> extra)) {
    throw FormatError(source, 1, "malformed MBSIG header");
  }
  ClipSignature sig;
  sig.clip_id = id;
  sig.frame_count = static_cast<std::size_t>(n);
  sig.region_count = static_cast<int>(regions);
  sig.low_motion = flag == 1;
  sig.barcodes.reserve(static_cast<std::size_t>(retained));
  long long prev = -1;
  for (long long k = 0; k < retained; ++k) {
    const auto lineno = static_cast<std::size_t>(k + 2);
    if (!std::getline(in, line)) throw FormatError(source, lineno, "missing barcode line");
    std::istringstream row(line);
    long long label = -1;
    std::string bits;
    if (!(row >> label >> bits) || (row >> extra)) throw FormatError(source, lineno, "malformed barcode line");
    if (label <= prev) throw FormatError(source, lineno, "labels must be strictly increasing");
    if (bits.size() != sig.frame_count) throw FormatError(source, lineno, "barcode length differs from N");
    try {
      sig.barcodes.push_back(MotionBarcode::from_string(bits, label));
    } catch (const InvalidArgument& e) {
      throw FormatError(source, lineno, e.what());
    }
    prev = label;
  }
  if (std::getline(in, line) && !line.empty()) {
    throw FormatError(source, static_cast<std::size_t>(retained + 2), "trailing data after barcodes");
  }
  return sig;
}

ClipSignature read_signature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_signature(in, path.string());
}

std::vector<ClipSignature> read_signature_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sig") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<ClipSignature> sigs;
  sigs.reserve(files.size());
  for (const auto& f : files) sigs.push_back(read_signature_file(f));
  return sigs;
}

}  // namespace motion_barcode
