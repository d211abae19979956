#pragma once

#include <cstddef>
#include <string_view>

#include "motion_barcode/barcode.hpp"
#include "motion_barcode/matching.hpp"
#include "motion_barcode/pooling.hpp"

namespace motion_barcode {

enum class SimilarityMethod { heuristic, assignment };

std::string_view to_string(SimilarityMethod method) noexcept;
/// Accepts "heuristic" or "assignment"; throws InvalidArgument otherwise.
SimilarityMethod parse_similarity_method(std::string_view name);

struct SimilarityScore {
  double value = 0.0;
  std::size_t matched_a = 0;  // C1
  std::size_t matched_b = 0;  // C2
  std::size_t size_a = 0;     // K1
  std::size_t size_b = 0;     // K2
  SimilarityMethod method = SimilarityMethod::heuristic;
};

/// Pearson correlation of two binary vectors from their counts:
/// (N*n11 - na*nb) / sqrt(na*(N-na) * nb*(N-nb)). When either side is
/// constant the result is 1 if the vectors are equal, else 0.
double correlation_from_counts(std::size_t n, std::size_t n11, std::size_t na, std::size_t nb,
                               bool equal) noexcept;

/// Throws InvalidArgument on length mismatch.
double correlation(const MotionBarcode& a, const MotionBarcode& b);

inline constexpr double kDefaultMatchThreshold = 0.4;

/// C1/K1 + C2/K2 where C_i counts barcodes of clip i whose best correlation
/// with the other clip is strictly above `threshold`.
SimilarityScore heuristic_similarity(const ClipSignature& a, const ClipSignature& b,
                                     double threshold = kDefaultMatchThreshold);

/// Correlation matrix between the barcodes of two signatures.
WeightMatrix correlation_matrix(const ClipSignature& a, const ClipSignature& b);

/// Maximum-weight matching on the correlation matrix, normalised by
/// min(K1, K2). matched_a == matched_b == number of matched pairs.
SimilarityScore assignment_similarity(const ClipSignature& a, const ClipSignature& b);

}  // namespace motion_barcode
