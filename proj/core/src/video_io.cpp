#include "motion_barcode/video_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "motion_barcode/errors.hpp"

namespace motion_barcode {

namespace fs = std::filesystem;

namespace {

// Skips whitespace and '#' comments in a PNM header.
void skip_header_space(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

bool read_header_int(std::istream& in, int& value) {
  skip_header_space(in);
  if (!std::isdigit(in.peek())) return false;
  long v = 0;
  while (std::isdigit(in.peek())) {
    v = v * 10 + (in.get() - '0');
    if (v > (1L << 30)) return false;
  }
  value = static_cast<int>(v);
  return true;
}

std::string manifest_stem(const fs::path& manifest_path) {
  return manifest_path.stem().string();
}

// Loads every image of a manifest, annotating failures with the manifest line.
template <typename Sequence, typename Convert>
Sequence load_sequence(const fs::path& manifest_path, Convert convert) {
  const auto entries = read_manifest(manifest_path);
  Sequence seq;
  seq.clip_id = manifest_stem(manifest_path);
  std::size_t line = 0;
  for (const auto& image_path : entries) {
    ++line;
    GrayImage image;
    try {
      image = read_pgm(image_path);
    } catch (const Error& e) {
      throw FormatError(manifest_path.string(), line, e.what());
    }
    if (line == 1) {
      seq.width = image.width;
      seq.height = image.height;
    } else if (image.width != seq.width || image.height != seq.height) {
      throw FormatError(manifest_path.string(), line,
                        "dimension mismatch: " + image_path.string() + " is " +
                            std::to_string(image.width) + "x" + std::to_string(image.height) +
                            ", expected " + std::to_string(seq.width) + "x" +
                            std::to_string(seq.height));
    }
    convert(seq, std::move(image), image_path, line);
  }
  return seq;
}

template <typename Sequence, typename Field>
fs::path write_sequence(const Sequence& seq, const Field& rasters, const fs::path& dir,
                        bool binary, const char* default_name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const fs::path manifest = dir / ((seq.clip_id.empty() ? std::string(default_name) : seq.clip_id) + ".txt");
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw IoError("cannot write " + manifest.string());

  GrayImage image{seq.width, seq.height, {}};
  char name[32];
  for (std::size_t t = 0; t < rasters.size(); ++t) {
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", t);
    image.pixels = rasters[t];
    if (binary) {
      for (auto& p : image.pixels) p = p ? 255 : 0;
    }
    write_pgm(dir / name, image);
    out << name << '\n';
  }
  out.flush();
  if (!out) throw IoError("cannot write " + manifest.string());
  return manifest;
}

}  // namespace

void validate(const FrameSequence& frames) {
  if (frames.width <= 0 || frames.height <= 0) throw InvalidArgument("frame dimensions must be positive");
  if (frames.frame_count() < 2) throw InvalidArgument("frame_count < 2");
  for (const auto& f : frames.frames) {
    if (f.size() != frames.pixel_count()) throw InvalidArgument("frame size does not match width*height");
  }
}

void validate(const MotionMaskSequence& masks) {
  if (masks.width <= 0 || masks.height <= 0) throw InvalidArgument("mask dimensions must be positive");
  for (const auto& m : masks.masks) {
    if (m.size() != masks.pixel_count()) throw InvalidArgument("mask size does not match width*height");
    for (auto v : m) {
      if (v > 1) throw InvalidArgument("mask values must be 0 or 1");
    }
  }
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw FormatError(path.string(), 0, "not a binary PGM (P5)");
  }
  GrayImage image;
  int maxval = 0;
  if (!read_header_int(in, image.width) || !read_header_int(in, image.height) ||
      !read_header_int(in, maxval)) {
    throw FormatError(path.string(), 0, "malformed PGM header");
  }
  if (image.width <= 0 || image.height <= 0) throw FormatError(path.string(), 0, "empty PGM raster");
  if (maxval != 255) {
    throw FormatError(path.string(), 0, "unsupported maxval " + std::to_string(maxval) + " (need 255)");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(in.get())) throw FormatError(path.string(), 0, "malformed PGM header");

  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw FormatError(path.string(), 0, "truncated PGM raster");
  }
  return image;
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<fs::path> read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();
  std::vector<fs::path> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fs::path p(line);
    entries.push_back(p.is_absolute() ? p : base / p);
  }
  return entries;
}

FrameSequence load_frame_sequence(const fs::path& manifest_path) {
  auto seq = load_sequence<FrameSequence>(
      manifest_path, [](FrameSequence& s, GrayImage&& image, const fs::path&, std::size_t) {
        s.frames.push_back(std::move(image.pixels));
      });
  if (seq.frame_count() < 2) throw FormatError(manifest_path.string(), 0, "frame_count < 2");
  return seq;
}

MotionMaskSequence load_mask_sequence(const fs::path& manifest_path) {
  return load_sequence<MotionMaskSequence>(
      manifest_path, [&](MotionMaskSequence& s, GrayImage&& image, const fs::path& image_path,
                         std::size_t line) {
        for (auto& p : image.pixels) {
          if (p == 255) {
            p = 1;
          } else if (p != 0) {
            throw FormatError(manifest_path.string(), line,
                              "non-binary mask in frame " + std::to_string(line - 1) + " (" +
                                  image_path.string() + "): value " + std::to_string(p));
          }
        }
        s.masks.push_back(std::move(image.pixels));
      });
}

fs::path write_mask_sequence(const MotionMaskSequence& masks, const fs::path& dir) {
  return write_sequence(masks, masks.masks, dir, true, "masks");
}

fs::path write_frame_sequence(const FrameSequence& frames, const fs::path& dir) {
  return write_sequence(frames, frames.frames, dir, false, "frames");
}

}  // namespace motion_barcode
