#include "motion_barcode/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include "motion_barcode/errors.hpp"
#include "motion_barcode/rng.hpp"
#include "motion_barcode/video_io.hpp"

namespace motion_barcode {

namespace {

struct Center {
  double intensity;
  double x;
  double y;
};

double gradient_at(const std::vector<double>& img, int width, int height, int x, int y) {
  auto v = [&](int xx, int yy) {
    xx = std::clamp(xx, 0, width - 1);
    yy = std::clamp(yy, 0, height - 1);
    return img[static_cast<std::size_t>(yy) * width + xx];
  };
  const double gx = v(x + 1, y) - v(x - 1, y);
  const double gy = v(x, y + 1) - v(x, y - 1);
  return gx * gx + gy * gy;
}

// Relabels labels into 4-connected components, folds components smaller than
// min_size into their largest neighbour and returns the number of regions.
int enforce_connectivity(std::vector<std::int32_t>& labels, int width, int height,
                         std::size_t min_size) {
  const std::size_t n = labels.size();
  std::vector<std::int32_t> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::size_t> stack;
  const std::array<std::array<int, 2>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(comp_size.size());
    comp[start] = id;
    std::size_t size = 0;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(p % width);
      const int y = static_cast<int>(p / width);
      for (const auto& d : dirs) {
        const int nx = x + d[0];
        const int ny = y + d[1];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const std::size_t q = static_cast<std::size_t>(ny) * width + nx;
        if (comp[q] < 0 && labels[q] == labels[p]) {
          comp[q] = id;
          stack.push_back(q);
        }
      }
    }
    comp_size.push_back(size);
  }

  // Union-find over components; merged components point at their absorber.
  std::vector<std::int32_t> parent(comp_size.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<std::int32_t>(i);
  auto find = [&](std::int32_t c) {
    while (parent[c] != c) c = parent[c] = parent[parent[c]];
    return c;
  };

  std::vector<std::vector<std::size_t>> members(comp_size.size());
  for (std::size_t p = 0; p < n; ++p) members[comp[p]].push_back(p);

  for (std::size_t c = 0; c < comp_size.size(); ++c) {
    const auto cid = static_cast<std::int32_t>(c);
    if (find(cid) != cid || comp_size[c] >= min_size) continue;
    std::int32_t best = -1;
    std::size_t best_size = 0;
    for (const std::size_t p : members[c]) {
      const int x = static_cast<int>(p % width);
      const int y = static_cast<int>(p / width);
      for (const auto& d : dirs) {
        const int nx = x + d[0];
        const int ny = y + d[1];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const std::int32_t other = find(comp[static_cast<std::size_t>(ny) * width + nx]);
        if (other == cid) continue;
        const std::size_t s = comp_size[other];
        if (s > best_size || (s == best_size && other < best)) {
          best = other;
          best_size = s;
        }
      }
    }
    if (best < 0) continue;
    parent[cid] = best;
    comp_size[best] += comp_size[c];
    auto& dst = members[best];
    dst.insert(dst.end(), members[c].begin(), members[c].end());
    members[c].clear();
    members[c].shrink_to_fit();
  }

  std::vector<std::int32_t> compact(comp_size.size(), -1);
  std::int32_t next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::int32_t root = find(comp[p]);
    if (compact[root] < 0) compact[root] = next++;
    labels[p] = compact[root];
  }
  return next;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
      (std::uint32_t{b[3]} << 24);
  return true;
}

}  // namespace

SuperpixelLabelMap slic_segment(const MotionImage& image, const SlicParams& params) {
  const int width = image.width;
  const int height = image.height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (width <= 0 || height <= 0 || image.counts.size() != n) throw InvalidArgument("malformed motion image");
  if (params.target_regions < 1) throw InvalidArgument("target_regions must be >= 1");
  if (static_cast<std::size_t>(params.target_regions) > n) {
    throw InvalidArgument("target_regions exceeds pixel count");
  }
  if (params.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (!(params.compactness >= 0.0)) throw InvalidArgument("compactness must be >= 0");

  const std::uint32_t max_count = *std::max_element(image.counts.begin(), image.counts.end());
  const double scale = 100.0 / std::max<std::uint32_t>(1, max_count);
  std::vector<double> intensity(n);
  for (std::size_t p = 0; p < n; ++p) intensity[p] = image.counts[p] * scale;

  const double area = static_cast<double>(n) / params.target_regions;
  const int step = std::max(1, static_cast<int>(std::lround(std::sqrt(area))));

  // Strip-centred grid, at most K centres.
  int nx = std::max(1, static_cast<int>(std::lround(static_cast<double>(width) / step)));
  int ny = std::max(1, static_cast<int>(std::lround(static_cast<double>(height) / step)));
  while (nx * ny > params.target_regions) {
    if (ny == 1 || (nx > 1 && static_cast<double>(width) / nx < static_cast<double>(height) / ny)) {
      --nx;
    } else {
      --ny;
    }
  }

  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      const double cx = (gx + 0.5) * width / nx - 0.5;
      const double cy = (gy + 0.5) * height / ny - 0.5;
      const int px = std::clamp(static_cast<int>(std::lround(cx)), 0, width - 1);
      const int py = std::clamp(static_cast<int>(std::lround(cy)), 0, height - 1);
      // Move to a strictly lower-gradient pixel of the 3x3 neighbourhood, if any.
      double best = gradient_at(intensity, width, height, px, py);
      int bx = -1, by = -1;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = px + dx;
          const int qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= width || qy >= height) continue;
          const double g = gradient_at(intensity, width, height, qx, qy);
          if (g < best) {
            best = g;
            bx = qx;
            by = qy;
          }
        }
      }
      if (bx >= 0) {
        centers.push_back({intensity[static_cast<std::size_t>(by) * width + bx], double(bx), double(by)});
      } else {
        centers.push_back({intensity[static_cast<std::size_t>(py) * width + px], cx, cy});
      }
    }
  }

  const double spatial_weight = (params.compactness / step) * (params.compactness / step);
  std::vector<std::int32_t> labels(n, -1);
  std::vector<double> dist(n);

  auto distance = [&](const Center& c, std::size_t p, int x, int y) {
    const double dc = intensity[p] - c.intensity;
    const double dx = x - c.x;
    const double dy = y - c.y;
    return dc * dc + (dx * dx + dy * dy) * spatial_weight;
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(labels.begin(), labels.end(), -1);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int cx = static_cast<int>(std::lround(c.x));
      const int cy = static_cast<int>(std::lround(c.y));
      const int x0 = std::max(0, cx - step), x1 = std::min(width - 1, cx + step);
      const int y0 = std::max(0, cy - step), y1 = std::min(height - 1, cy + step);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * width + x;
          const double d = distance(c, p, x, y);
          // Centres are visited in label order, so strict < keeps the lower label on ties.
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = static_cast<std::int32_t>(k);
          }
        }
      }
    }
    // Pixels outside every window go to the globally nearest centre.
    for (std::size_t p = 0; p < n; ++p) {
      if (labels[p] >= 0) continue;
      const int x = static_cast<int>(p % width);
      const int y = static_cast<int>(p / width);
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = distance(centers[k], p, x, y);
        if (d < dist[p]) {
          dist[p] = d;
          labels[p] = static_cast<std::int32_t>(k);
        }
      }
    }

    std::vector<std::array<double, 4>> sums(centers.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t p = 0; p < n; ++p) {
      auto& s = sums[labels[p]];
      s[0] += intensity[p];
      s[1] += static_cast<double>(p % width);
      s[2] += static_cast<double>(p / width);
      s[3] += 1.0;
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (sums[k][3] == 0.0) continue;
      centers[k] = {sums[k][0] / sums[k][3], sums[k][1] / sums[k][3], sums[k][2] / sums[k][3]};
    }
  }

  SuperpixelLabelMap map;
  map.width = width;
  map.height = height;
  const auto min_size = static_cast<std::size_t>(std::ceil(area / 4.0));
  map.region_count = enforce_connectivity(labels, width, height, min_size);
  map.labels = std::move(labels);
  return map;
}

void write_label_pgm(const std::filesystem::path& path, const SuperpixelLabelMap& map) {
  GrayImage image{map.width, map.height, std::vector<std::uint8_t>(map.labels.size())};
  for (std::size_t p = 0; p < map.labels.size(); ++p) {
    image.pixels[p] = static_cast<std::uint8_t>(splitmix64(static_cast<std::uint64_t>(map.labels[p])) & 0xff);
  }
  write_pgm(path, image);
}

void write_label_raw(const std::filesystem::path& path, const SuperpixelLabelMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_u32(out, static_cast<std::uint32_t>(map.height));
  for (auto l : map.labels) put_u32(out, static_cast<std::uint32_t>(l));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

SuperpixelLabelMap read_label_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint32_t w = 0, h = 0;
  if (!get_u32(in, w) || !get_u32(in, h) || w == 0 || h == 0 || w > (1U << 16) || h > (1U << 16)) {
    throw FormatError(path.string(), 0, "malformed label header");
  }
  SuperpixelLabelMap map;
  map.width = static_cast<int>(w);
  map.height = static_cast<int>(h);
  map.labels.resize(static_cast<std::size_t>(w) * h);
  std::int32_t max_label = -1;
  for (auto& l : map.labels) {
    std::uint32_t v = 0;
    if (!get_u32(in, v)) throw FormatError(path.string(), 0, "truncated label raster");
    if (v > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max())) {
      throw FormatError(path.string(), 0, "label out of range");
    }
    l = static_cast<std::int32_t>(v);
    max_label = std::max(max_label, l);
  }
  map.region_count = max_label + 1;
  return map;
}

}  // namespace motion_barcode
