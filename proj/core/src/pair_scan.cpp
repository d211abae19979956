#include "pair_scan.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>

#include "motion_barcode/similarity.hpp"

#if defined(__x86_64__) && defined(__ELF__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define MB_X86_DISPATCH 1
// Portable kernel: hardware-popcount clone next to the generic one, picked
// by the loader.
#define MB_POPCOUNT_CLONES __attribute__((target_clones("popcnt", "default")))
#define MB_AVX512_TARGET __attribute__((target("avx512f,avx512vpopcntdq")))
#else
#define MB_X86_DISPATCH 0
#define MB_POPCOUNT_CLONES
#endif

namespace motion_barcode::detail {

namespace {

// Smallest n11 with correlation > threshold for each pair of ones counts.
// r is non-decreasing in n11 for fixed counts, so "r > threshold" is exactly
// "n11 >= cutoff" and the pair loop needs no floating point.
class CutoffTable {
 public:
  CutoffTable(const ClipSignature& a, const ClipSignature& b, double threshold)
      : n_(a.frame_count), threshold_(threshold), slot_a_(n_ + 1, -1), slot_b_(n_ + 1, -1) {
    for (const auto& x : a.barcodes) intern(x.ones_count(), slot_a_, counts_a_);
    for (const auto& y : b.barcodes) intern(y.ones_count(), slot_b_, counts_b_);
    cutoff_.resize(counts_a_.size() * counts_b_.size());
    for (std::size_t r = 0; r < counts_a_.size(); ++r) {
      for (std::size_t c = 0; c < counts_b_.size(); ++c) cutoff_[r * counts_b_.size() + c] = solve(counts_a_[r], counts_b_[c]);
    }
  }

  /// Cutoffs against every column for a barcode of `a` with `na` ones.
  const std::uint32_t* row(std::size_t na) const {
    return &cutoff_[static_cast<std::size_t>(slot_a_[na]) * counts_b_.size()];
  }
  std::uint32_t column(std::size_t nb) const { return static_cast<std::uint32_t>(slot_b_[nb]); }

 private:
  static void intern(std::size_t count, std::vector<int>& slot, std::vector<std::size_t>& counts) {
    if (slot[count] >= 0) return;
    slot[count] = static_cast<int>(counts.size());
    counts.push_back(count);
  }

  bool clears(std::size_t n11, std::size_t na, std::size_t nb) const {
    return correlation_from_counts(n_, n11, na, nb, n11 == na && n11 == nb) > threshold_;
  }

  std::uint32_t solve(std::size_t na, std::size_t nb) const {
    std::size_t lo = na + nb > n_ ? na + nb - n_ : 0;
    std::size_t hi = std::min(na, nb);
    if (!clears(hi, na, nb)) return static_cast<std::uint32_t>(hi + 1);  // unreachable
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (clears(mid, na, nb)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return static_cast<std::uint32_t>(lo);
  }

  std::size_t n_;
  double threshold_;
  std::vector<int> slot_a_, slot_b_;
  std::vector<std::size_t> counts_a_, counts_b_;
  std::vector<std::uint32_t> cutoff_;
};

// Rows of `a` are scanned kRows at a time so each barcode of `b` is loaded
// once per block. A pair is skipped once both ends have a match.
constexpr std::size_t kRows = 4;

struct ScanInput {
  std::size_t words = 0;
  std::vector<const std::uint64_t*> bits_a, bits_b;
  std::vector<const std::uint32_t*> cut_a;  // cutoff row per barcode of a
  std::vector<std::uint32_t> column_b;
};

ScanInput prepare(const ClipSignature& a, const ClipSignature& b, const CutoffTable& table) {
  ScanInput in;
  in.words = a.barcodes.front().words().size();
  for (const auto& x : a.barcodes) {
    in.bits_a.push_back(x.words().data());
    in.cut_a.push_back(table.row(x.ones_count()));
  }
  for (const auto& y : b.barcodes) {
    in.bits_b.push_back(y.words().data());
    in.column_b.push_back(table.column(y.ones_count()));
  }
  return in;
}

// Scalar kernel. From the middle word on, n11 can grow by at most the smaller
// number of ones left in either barcode; once that cannot reach the cutoff
// for any row of the block the remaining words are not read.
MB_POPCOUNT_CLONES
std::size_t scan_portable(const ScanInput& in, std::vector<char>& hit_b) {
  constexpr std::size_t kStride = 2;
  const std::size_t words = in.words;
  const std::size_t half = words / 2;
  const std::size_t na = in.bits_a.size(), nb = in.bits_b.size();
  // rest[i * (words + 1) + w] = ones of barcode i in words [w, words)
  auto suffix_ones = [words](const std::vector<const std::uint64_t*>& bits) {
    std::vector<std::uint32_t> rest(bits.size() * (words + 1), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      std::uint32_t* r = &rest[i * (words + 1)];
      for (std::size_t w = words; w-- > 0;) r[w] = r[w + 1] + static_cast<std::uint32_t>(std::popcount(bits[i][w]));
    }
    return rest;
  };
  const auto rest_a = suffix_ones(in.bits_a);
  const auto rest_b = suffix_ones(in.bits_b);

  std::size_t matched = 0;
  for (std::size_t i0 = 0; i0 < na; i0 += kRows) {
    const std::size_t rows = std::min(kRows, na - i0);
    std::array<const std::uint64_t*, kRows> x{};
    std::array<const std::uint32_t*, kRows> rx{}, cut{};
    for (std::size_t r = 0; r < kRows; ++r) {
      // Short blocks repeat their last row; the duplicate's result is ignored.
      const std::size_t i = i0 + std::min(r, rows - 1);
      x[r] = in.bits_a[i];
      rx[r] = &rest_a[i * (words + 1)];
      cut[r] = in.cut_a[i];
    }
    std::array<bool, kRows> hit{};
    std::size_t unmatched = rows;
    for (std::size_t j = 0; j < nb; ++j) {
      if (hit_b[j] && unmatched == 0) continue;
      const std::uint64_t* y = in.bits_b[j];
      const std::uint32_t* ry = &rest_b[j * (words + 1)];
      std::array<std::size_t, kRows> n11{}, need{};
      for (std::size_t r = 0; r < rows; ++r) need[r] = cut[r][in.column_b[j]];
      bool reachable = true;
      for (std::size_t w = 0; w < words; ++w) {
        if (w >= half && (w - half) % kStride == 0) {
          reachable = false;
          for (std::size_t r = 0; r < rows; ++r) reachable = reachable || n11[r] + std::min(rx[r][w], ry[w]) >= need[r];
          if (!reachable) break;
        }
        const std::uint64_t v = y[w];
        for (std::size_t r = 0; r < kRows; ++r) n11[r] += static_cast<std::size_t>(std::popcount(x[r][w] & v));
      }
      if (!reachable) continue;
      for (std::size_t r = 0; r < rows; ++r) {
        if (n11[r] >= need[r]) {
          if (!hit[r]) --unmatched;
          hit[r] = true;
          hit_b[j] = 1;
        }
      }
    }
    for (std::size_t r = 0; r < rows; ++r) matched += hit[r] ? 1 : 0;
  }
  return matched;
}

#if MB_X86_DISPATCH
// 512 bits per step with a vector popcount; no early exit.
MB_AVX512_TARGET
std::size_t scan_avx512(const ScanInput& in, std::vector<char>& hit_b) {
  const std::size_t words = in.words;
  const std::size_t full = words / 8;
  const auto tail = static_cast<__mmask8>((1U << (words % 8)) - 1);
  const std::size_t na = in.bits_a.size(), nb = in.bits_b.size();

  std::size_t matched = 0;
  for (std::size_t i0 = 0; i0 < na; i0 += kRows) {
    const std::size_t rows = std::min(kRows, na - i0);
    std::array<const std::uint64_t*, kRows> x{};
    std::array<const std::uint32_t*, kRows> cut{};
    for (std::size_t r = 0; r < kRows; ++r) {
      const std::size_t i = i0 + std::min(r, rows - 1);
      x[r] = in.bits_a[i];
      cut[r] = in.cut_a[i];
    }
    std::array<bool, kRows> hit{};
    std::size_t unmatched = rows;
    for (std::size_t j = 0; j < nb; ++j) {
      if (hit_b[j] && unmatched == 0) continue;
      const std::uint64_t* y = in.bits_b[j];
      __m512i acc[kRows];
      for (auto& v : acc) v = _mm512_setzero_si512();
      for (std::size_t k = 0; k < full; ++k) {
        const __m512i v = _mm512_loadu_si512(y + 8 * k);
        for (std::size_t r = 0; r < kRows; ++r) {
          acc[r] = _mm512_add_epi64(acc[r], _mm512_popcnt_epi64(_mm512_and_si512(_mm512_loadu_si512(x[r] + 8 * k), v)));
        }
      }
      if (tail != 0) {
        const __m512i v = _mm512_maskz_loadu_epi64(tail, y + 8 * full);
        for (std::size_t r = 0; r < kRows; ++r) {
          const __m512i xr = _mm512_maskz_loadu_epi64(tail, x[r] + 8 * full);
          acc[r] = _mm512_add_epi64(acc[r], _mm512_popcnt_epi64(_mm512_and_si512(xr, v)));
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        const auto n11 = static_cast<std::size_t>(_mm512_reduce_add_epi64(acc[r]));
        if (n11 >= cut[r][in.column_b[j]]) {
          if (!hit[r]) --unmatched;
          hit[r] = true;
          hit_b[j] = 1;
        }
      }
    }
    for (std::size_t r = 0; r < rows; ++r) matched += hit[r] ? 1 : 0;
  }
  return matched;
}
#endif

}  // namespace

bool avx512_scan_available() noexcept {
#if MB_X86_DISPATCH
  static const bool available = __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vpopcntdq");
  return available;
#else
  return false;
#endif
}

std::size_t scan_threshold_pairs(const ClipSignature& a, const ClipSignature& b, double threshold,
                                 std::vector<char>& hit_b, ScanKernel kernel) {
  hit_b.assign(b.size(), 0);
  if (a.barcodes.empty() || b.barcodes.empty()) return 0;
  const CutoffTable table(a, b, threshold);
  const ScanInput in = prepare(a, b, table);
  if (kernel == ScanKernel::automatic) kernel = avx512_scan_available() ? ScanKernel::avx512 : ScanKernel::portable;
#if MB_X86_DISPATCH
  if (kernel == ScanKernel::avx512 && avx512_scan_available()) return scan_avx512(in, hit_b);
#endif
  return scan_portable(in, hit_b);
}

}  // namespace motion_barcode::detail
