#include "motion_barcode/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "motion_barcode/errors.hpp"

namespace motion_barcode {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgument("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

}  // namespace

std::string_view to_string(DetectorKind kind) noexcept {
  return kind == DetectorKind::vibe ? "vibe" : "framediff";
}

DetectorKind parse_detector(std::string_view name) {
  if (name == "vibe") return DetectorKind::vibe;
  if (name == "framediff") return DetectorKind::framediff;
  throw InvalidArgument("unknown detector '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  background.validate();
  if (framediff_threshold < 0) throw InvalidArgument("framediff_threshold must be >= 0");
  if (!(signature.min_motion_fraction >= 0.0 && signature.min_motion_fraction <= 1.0)) {
    throw InvalidArgument("min_motion must lie in [0, 1]");
  }
  if (signature.slic.target_regions < 1) throw InvalidArgument("regions must be >= 1");
  if (signature.slic.iterations < 1) throw InvalidArgument("slic_iterations must be >= 1");
  if (!(signature.slic.compactness >= 0.0)) throw InvalidArgument("compactness must be >= 0");
  if (!(query.threshold >= -1.0 && query.threshold <= 1.0)) throw InvalidArgument("threshold must lie in [-1, 1]");
}

void apply_setting(PipelineConfig& c, std::string_view key, std::string_view value) {
  if (key == "detector") {
    c.detector = parse_detector(value);
  } else if (key == "threshold") {
    c.query.threshold = parse_number<double>(key, value);
  } else if (key == "method") {
    c.query.method = parse_similarity_method(value);
  } else if (key == "regions") {
    c.signature.slic.target_regions = parse_number<int>(key, value);
  } else if (key == "compactness") {
    c.signature.slic.compactness = parse_number<double>(key, value);
  } else if (key == "slic_iterations") {
    c.signature.slic.iterations = parse_number<int>(key, value);
  } else if (key == "min_motion") {
    c.signature.min_motion_fraction = parse_number<double>(key, value);
  } else if (key == "min_barcodes") {
    c.signature.min_barcodes = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
    c.background.rng_seed = c.seed;
  } else if (key == "vibe_samples") {
    c.background.samples_per_pixel = parse_number<int>(key, value);
  } else if (key == "vibe_radius") {
    c.background.match_radius = parse_number<int>(key, value);
  } else if (key == "vibe_min_matches") {
    c.background.min_matches = parse_number<int>(key, value);
  } else if (key == "vibe_subsample") {
    c.background.subsample_factor = parse_number<int>(key, value);
  } else if (key == "framediff_threshold") {
    c.framediff_threshold = parse_number<int>(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config(PipelineConfig& config, std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw FormatError(source, lineno, "expected key = value");
    try {
      apply_setting(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw FormatError(source, lineno, e.what());
    }
  }
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  apply_config(config, in, path.string());
}

MotionMaskSequence detect(const FrameSequence& frames, const PipelineConfig& config) {
  return config.detector == DetectorKind::vibe ? detect_motion(frames, config.background)
                                               : detect_motion_framediff(frames, config.framediff_threshold);
}

}  // namespace motion_barcode
