#include <random>

#include "doctest.h"
#include "motion_barcode/errors.hpp"
#include "motion_barcode/matching.hpp"
#include "oracles.hpp"

using namespace motion_barcode;

namespace {

WeightMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  WeightMatrix w(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < w.rows; ++i) {
    for (std::size_t j = 0; j < w.cols; ++j) w(i, j) = rows[i][j];
  }
  return w;
}

void check_valid(const Matching& m, const WeightMatrix& w) {
  std::vector<char> row_used(w.rows, 0), col_used(w.cols, 0);
  double total = 0.0;
  for (auto [i, j] : m.pairs) {
    REQUIRE(i < w.rows);
    REQUIRE(j < w.cols);
    CHECK_FALSE(row_used[i]);
    CHECK_FALSE(col_used[j]);
    row_used[i] = col_used[j] = 1;
    CHECK(w(i, j) > 0.0);
    total += w(i, j);
  }
  CHECK(total == doctest::Approx(m.total_weight));
}

}  // namespace

TEST_CASE("trivial matrices") {
  const auto one = max_weight_matching(from_rows({{1.0}}));
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(one.total_weight == 1.0);

  const auto neg = max_weight_matching(from_rows({{-1.0}}));
  CHECK(neg.pairs.empty());
  CHECK(neg.total_weight == 0.0);

  CHECK(max_weight_matching(WeightMatrix{}).pairs.empty());
  CHECK(max_weight_matching(WeightMatrix(0, 3)).total_weight == 0.0);
}

TEST_CASE("random integer matrices match exhaustive search") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    std::vector<std::vector<double>> rows(r, std::vector<double>(c));
    for (auto& row : rows) {
      for (auto& v : row) v = static_cast<double>(static_cast<int>(rng() % 11) - 5);
    }
    const auto w = from_rows(rows);
    const auto m = max_weight_matching(w);
    CAPTURE(trial);
    CHECK(m.total_weight == mb_test::brute_force_matching(rows));
    check_valid(m, w);
    CHECK(max_weight_matching(w).pairs == m.pairs);
  }
}

TEST_CASE("rectangular and fractional weights") {
  const auto w = from_rows({{0.9, 0.8, 0.1}, {0.85, 0.2, 0.0}});
  const auto m = max_weight_matching(w);
  CHECK(m.total_weight == doctest::Approx(1.65));
  check_valid(m, w);

  const auto t = from_rows({{0.9, 0.85}, {0.8, 0.2}, {0.1, 0.0}});
  CHECK(max_weight_matching(t).total_weight == doctest::Approx(1.65));
}

TEST_CASE("non-finite weights are rejected") {
  auto w = from_rows({{1.0, std::nan("")}});
  CHECK_THROWS_AS(max_weight_matching(w), InvalidArgument);
}
