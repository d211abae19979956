#include "motion_barcode/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "motion_barcode/errors.hpp"
#include "pair_scan.hpp"

namespace motion_barcode {

namespace {

void check_pair(const ClipSignature& a, const ClipSignature& b) {
  if (a.barcodes.empty() || b.barcodes.empty()) throw InvalidArgument("empty signature");
  if (a.frame_count != b.frame_count) throw InvalidArgument("signatures differ in frame count");
}

}  // namespace

std::string_view to_string(SimilarityMethod method) noexcept {
  return method == SimilarityMethod::heuristic ? "heuristic" : "assignment";
}

SimilarityMethod parse_similarity_method(std::string_view name) {
  if (name == "heuristic") return SimilarityMethod::heuristic;
  if (name == "assignment") return SimilarityMethod::assignment;
  throw InvalidArgument("unknown similarity method '" + std::string(name) + "'");
}

double correlation_from_counts(std::size_t n, std::size_t n11, std::size_t na, std::size_t nb,
                               bool equal) noexcept {
  if (na == 0 || na == n || nb == 0 || nb == n) return equal ? 1.0 : 0.0;
  const auto num = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n11) -
                   static_cast<std::int64_t>(na) * static_cast<std::int64_t>(nb);
  const double va = static_cast<double>(static_cast<std::uint64_t>(na) * (n - na));
  const double vb = static_cast<double>(static_cast<std::uint64_t>(nb) * (n - nb));
  return static_cast<double>(num) / std::sqrt(va * vb);
}

double correlation(const MotionBarcode& a, const MotionBarcode& b) {
  if (a.size() != b.size()) throw InvalidArgument("barcode lengths differ");
  const std::size_t n11 = count_common_ones(a, b);
  return correlation_from_counts(a.size(), n11, a.ones_count(), b.ones_count(), a == b);
}

SimilarityScore heuristic_similarity(const ClipSignature& a, const ClipSignature& b, double threshold) {
  check_pair(a, b);
  SimilarityScore s;
  s.method = SimilarityMethod::heuristic;
  s.size_a = a.size();
  s.size_b = b.size();
  std::vector<char> hit_b(b.size(), 0);
  s.matched_a = detail::scan_threshold_pairs(a, b, threshold, hit_b);
  s.matched_b = static_cast<std::size_t>(std::count(hit_b.begin(), hit_b.end(), 1));
  s.value = static_cast<double>(s.matched_a) / static_cast<double>(s.size_a) +
            static_cast<double>(s.matched_b) / static_cast<double>(s.size_b);
  return s;
}

WeightMatrix correlation_matrix(const ClipSignature& a, const ClipSignature& b) {
  WeightMatrix w(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) w(i, j) = correlation(a.barcodes[i], b.barcodes[j]);
  }
  return w;
}

SimilarityScore assignment_similarity(const ClipSignature& a, const ClipSignature& b) {
  check_pair(a, b);
  const Matching m = max_weight_matching(correlation_matrix(a, b));
  SimilarityScore s;
  s.method = SimilarityMethod::assignment;
  s.size_a = a.size();
  s.size_b = b.size();
  s.matched_a = s.matched_b = m.pairs.size();
  s.value = m.total_weight / static_cast<double>(std::min(a.size(), b.size()));
  return s;
}

}  // namespace motion_barcode
