#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "motion_barcode/motion_detection.hpp"
#include "motion_barcode/pooling.hpp"
#include "motion_barcode/retrieval.hpp"

namespace motion_barcode {

enum class DetectorKind { vibe, framediff };

std::string_view to_string(DetectorKind kind) noexcept;
DetectorKind parse_detector(std::string_view name);

/// Every tunable of the pipeline with its default.
struct PipelineConfig {
  DetectorKind detector = DetectorKind::vibe;
  BackgroundModelParams background;
  int framediff_threshold = 25;
  SignatureParams signature;  // min_motion 0.1, min_barcodes 100, regions 1000, m 10, 10 iterations
  QueryOptions query;         // heuristic, threshold 0.4
  std::uint64_t seed = 0;     // background model seed; the synthetic generator has its own

  void validate() const;
};

/// Applies one `key = value` setting. Throws InvalidArgument for unknown keys
/// or unparsable values.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Applies a config file: `key = value` lines, '#' starts a comment.
void apply_config(PipelineConfig& config, std::istream& in, const std::string& source);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// Runs the configured detector.
MotionMaskSequence detect(const FrameSequence& frames, const PipelineConfig& config);

}  // namespace motion_barcode
