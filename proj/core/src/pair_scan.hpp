#pragma once

#include <cstddef>
#include <vector>

#include "motion_barcode/pooling.hpp"

namespace motion_barcode::detail {

enum class ScanKernel { automatic, portable, avx512 };

/// Heuristic core. Returns how many barcodes of `a` have a partner in `b`
/// with correlation strictly above `threshold` and sets hit_b[j] for every
/// barcode of `b` that has one. All kernels give identical results.
std::size_t scan_threshold_pairs(const ClipSignature& a, const ClipSignature& b, double threshold,
                                 std::vector<char>& hit_b, ScanKernel kernel = ScanKernel::automatic);

/// Whether the AVX-512 kernel can run on this CPU.
bool avx512_scan_available() noexcept;

}  // namespace motion_barcode::detail
