#include "motion_barcode/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motion_barcode/errors.hpp"

namespace motion_barcode {

namespace {

// Minimum-cost assignment of every row to a distinct column, rows <= cols.
// Returns col_of_row. cost(i, j) is 0-based.
template <typename Cost>
std::vector<std::size_t> solve_assignment(std::size_t rows, std::size_t cols, Cost cost) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> row_of_col(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> minv(cols + 1);
  std::vector<char> used(cols + 1);

  for (std::size_t i = 1; i <= rows; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (row_of_col[j] != 0) col_of_row[row_of_col[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

Matching max_weight_matching(const WeightMatrix& weights) {
  if (weights.values.size() != weights.rows * weights.cols) throw InvalidArgument("malformed weight matrix");
  for (double w : weights.values) {
    if (!std::isfinite(w)) throw InvalidArgument("weights must be finite");
  }
  Matching result;
  if (weights.rows == 0 || weights.cols == 0) return result;

  const bool transpose = weights.rows > weights.cols;
  const std::size_t rows = transpose ? weights.cols : weights.rows;
  const std::size_t cols = transpose ? weights.rows : weights.cols;
  auto weight = [&](std::size_t i, std::size_t j) { return transpose ? weights(j, i) : weights(i, j); };

  const auto col_of_row =
      solve_assignment(rows, cols, [&](std::size_t i, std::size_t j) { return -std::max(0.0, weight(i, j)); });

  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = col_of_row[i];
    if (weight(i, j) <= 0.0) continue;
    result.pairs.emplace_back(transpose ? j : i, transpose ? i : j);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  for (const auto& [i, j] : result.pairs) result.total_weight += weights(i, j);
  return result;
}

}  // namespace motion_barcode
