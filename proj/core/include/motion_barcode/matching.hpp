#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace motion_barcode {

/// Dense row-major weight matrix.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted
  double total_weight = 0.0;
};

/// Maximum-weight bipartite matching where vertices may stay unmatched.
///
/// Solved as an assignment problem (Kuhn-Munkres with potentials, O(n^2 m))
/// on max(w, 0); pairs whose weight is not positive are dropped from the
/// result since leaving both ends unmatched is never worse. Deterministic for
/// a given matrix. Throws InvalidArgument for non-finite weights.
Matching max_weight_matching(const WeightMatrix& weights);

}  // namespace motion_barcode
