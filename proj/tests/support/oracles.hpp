#pragma once

// Independent reference computations used to derive expected values. None of
// these call into the library's implementation of the quantity they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "motion_barcode/motion_detection.hpp"
#include "motion_barcode/rng.hpp"

namespace mb_test {

/// Pearson correlation through means and variances.
inline double direct_pearson(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

/// Maximum total over all partial injective row->column assignments.
inline double brute_force_matching(const std::vector<std::vector<double>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  std::vector<char> used(cols, 0);
  double best = 0.0;
  auto rec = [&](auto&& self, std::size_t i, double acc) -> void {
    if (i == rows) {
      best = std::max(best, acc);
      return;
    }
    self(self, i + 1, acc);  // row i unmatched
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, acc + w[i][j]);
      used[j] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

/// min over all 2^n candidates of the summed Hamming distance to `members`
/// (each an n-bit mask).
inline unsigned brute_force_min_hamming_sum(const std::vector<std::uint32_t>& members, unsigned n) {
  unsigned best = std::numeric_limits<unsigned>::max();
  for (std::uint32_t c = 0; c < (1U << n); ++c) {
    unsigned sum = 0;
    for (auto m : members) sum += static_cast<unsigned>(__builtin_popcount(c ^ m));
    best = std::min(best, sum);
  }
  return best;
}

/// Straight-line replay of the background-model rules: per-pixel sample
/// lists, one pixel at a time, with the documented random streams.
inline std::vector<std::vector<int>> reference_background_subtraction(
    const std::vector<std::vector<int>>& frames, int width, int height,
    const motion_barcode::BackgroundModelParams& p) {
  using motion_barcode::counter_hash;
  using motion_barcode::hash_below;
  namespace vs = motion_barcode::vibe_stream;

  auto neighbours = [&](int x, int y) {
    std::vector<std::array<int, 2>> out;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < width && ny < height) out.push_back({nx, ny});
      }
    }
    return out;
  };

  // model[y][x] = list of samples
  std::vector<std::vector<std::vector<int>>> model(height, std::vector<std::vector<int>>(width));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto nb = neighbours(x, y);
      for (int k = 0; k < p.samples_per_pixel; ++k) {
        if (k < p.min_matches || nb.empty()) {
          model[y][x].push_back(frames[0][y * width + x]);
        } else {
          const auto pick = hash_below(counter_hash(p.rng_seed, x, y, 0, vs::kInitNeighbor + k),
                                       static_cast<std::uint32_t>(nb.size()));
          model[y][x].push_back(frames[0][nb[pick][1] * width + nb[pick][0]]);
        }
      }
    }
  }

  std::vector<std::vector<int>> masks(frames.size(), std::vector<int>(width * height, 0));
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const auto& f = frames[t];
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        int close = 0;
        for (int s : model[y][x]) close += std::abs(f[y * width + x] - s) <= p.match_radius;
        masks[t][y * width + x] = close >= p.min_matches ? 0 : 1;
      }
    }
    const auto factor = static_cast<std::uint32_t>(p.subsample_factor);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (masks[t][y * width + x]) continue;
        if (hash_below(counter_hash(p.rng_seed, x, y, t, vs::kSelfCoin), factor) == 0) {
          const auto slot = hash_below(counter_hash(p.rng_seed, x, y, t, vs::kSelfSlot),
                                       static_cast<std::uint32_t>(p.samples_per_pixel));
          model[y][x][slot] = f[y * width + x];
        }
      }
    }
    const auto shared = static_cast<std::uint32_t>(p.samples_per_pixel - p.min_matches);
    if (shared == 0) continue;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (masks[t][y * width + x]) continue;
        if (hash_below(counter_hash(p.rng_seed, x, y, t, vs::kNeighborCoin), factor) != 0) continue;
        const auto nb = neighbours(x, y);
        const auto pick = hash_below(counter_hash(p.rng_seed, x, y, t, vs::kNeighborPick),
                                     static_cast<std::uint32_t>(nb.size()));
        const auto slot = p.min_matches + hash_below(counter_hash(p.rng_seed, x, y, t, vs::kNeighborSlot), shared);
        model[nb[pick][1]][nb[pick][0]][slot] = f[y * width + x];
      }
    }
  }
  return masks;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return va == vb ? 1.0 : 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace mb_test
