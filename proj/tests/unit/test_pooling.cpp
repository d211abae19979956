#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "motion_barcode/errors.hpp"
#include "motion_barcode/pooling.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace motion_barcode;

namespace {

// Builds a 1-row mask sequence whose pixel p carries barcode strings[p], with
// every pixel in region 0.
std::pair<MotionMaskSequence, SuperpixelLabelMap> single_region(const std::vector<std::string>& barcodes) {
  const int w = static_cast<int>(barcodes.size());
  const std::size_t n = barcodes.front().size();
  MotionMaskSequence m{w, 1, std::vector<std::vector<std::uint8_t>>(n, std::vector<std::uint8_t>(w, 0)), "r"};
  for (int p = 0; p < w; ++p) {
    for (std::size_t t = 0; t < n; ++t) m.masks[t][p] = barcodes[p][t] == '1';
  }
  return {m, SuperpixelLabelMap{w, 1, 1, std::vector<std::int32_t>(w, 0)}};
}

}  // namespace

TEST_CASE("pool_superpixel rounds the per-bit mean") {
  {
    const auto [m, l] = single_region({"110", "100", "101"});
    CHECK(pool_superpixel(m, l, 0).to_string() == "100");
  }
  {
    const auto [m, l] = single_region({"0110", "0110", "0110"});
    CHECK(pool_superpixel(m, l, 0).to_string() == "0110");
  }
  {
    const auto [m, l] = single_region({"10", "01"});
    CHECK(pool_superpixel(m, l, 0).to_string() == "11");
  }
  const auto [m, l] = single_region({"10", "01"});
  CHECK_THROWS_AS(pool_superpixel(m, l, 1), InvalidArgument);
  CHECK_THROWS_AS(pool_superpixel(m, l, -1), InvalidArgument);
}

TEST_CASE("representative minimises the summed Hamming distance") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned n = 1 + rng() % 10;
    const std::size_t members = 1 + rng() % 10;
    std::vector<std::uint32_t> bits(members);
    std::vector<std::string> strings(members);
    for (std::size_t i = 0; i < members; ++i) {
      bits[i] = rng() & ((1U << n) - 1);
      for (unsigned t = 0; t < n; ++t) strings[i].push_back(((bits[i] >> t) & 1) ? '1' : '0');
    }
    const auto [m, l] = single_region(strings);
    const auto rep = pool_superpixel(m, l, 0);
    unsigned sum = 0;
    for (auto b : bits) {
      for (unsigned t = 0; t < n; ++t) sum += rep.test(t) != (((b >> t) & 1) != 0);
    }
    CHECK(sum == mb_test::brute_force_min_hamming_sum(bits, n));

    // Pixel order inside the region is irrelevant.
    auto shuffled = strings;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto [m2, l2] = single_region(shuffled);
    CHECK(pool_superpixel(m2, l2, 0) == rep);
  }
}

TEST_CASE("build_signature") {
  SUBCASE("all-zero masks give an empty low-motion signature") {
    MotionMaskSequence m{4, 4, std::vector<std::vector<std::uint8_t>>(10, std::vector<std::uint8_t>(16, 0)), "still"};
    SuperpixelLabelMap l{4, 4, 2, std::vector<std::int32_t>(16, 0)};
    for (std::size_t p = 8; p < 16; ++p) l.labels[p] = 1;
    const auto sig = build_signature(m, l);
    CHECK(sig.barcodes.empty());
    CHECK(sig.low_motion);
    CHECK(sig.region_count == 2);
    CHECK(sig.clip_id == "still");
  }
  SUBCASE("every active region passes through when K >= min_barcodes") {
    // 4 regions (one per row), each moving on frames t % 4 == row.
    MotionMaskSequence m{3, 4, std::vector<std::vector<std::uint8_t>>(20, std::vector<std::uint8_t>(12, 0)), "busy"};
    SuperpixelLabelMap l{3, 4, 4, std::vector<std::int32_t>(12, 0)};
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 3; ++x) {
        l.labels[static_cast<std::size_t>(y) * 3 + x] = y;
        for (std::size_t t = 0; t < 20; ++t) m.masks[t][static_cast<std::size_t>(y) * 3 + x] = (t % 4) == static_cast<std::size_t>(y);
      }
    }
    const auto sig = build_signature(m, l, 0.1, 4);
    REQUIRE(sig.barcodes.size() == 4);
    CHECK_FALSE(sig.low_motion);
    for (int k = 0; k < 4; ++k) {
      CHECK(sig.barcodes[k].source_id() == k);
      CHECK(sig.barcodes[k].ones_count() == 5);
    }
    CHECK(build_signature(m, l, 0.1, 5).low_motion);
    CHECK(build_signature(m, l) == build_signature(m, l));
  }
  SUBCASE("dimension mismatch") {
    MotionMaskSequence m{4, 4, std::vector<std::vector<std::uint8_t>>(3, std::vector<std::uint8_t>(16, 0)), "x"};
    SuperpixelLabelMap l{4, 3, 1, std::vector<std::int32_t>(12, 0)};
    CHECK_THROWS_AS(build_signature(m, l), InvalidArgument);
  }
}

TEST_CASE("signature text format") {
  ClipSignature sig;
  sig.clip_id = "cam3";
  sig.frame_count = 5;
  sig.region_count = 9;
  sig.low_motion = true;
  sig.barcodes.push_back(MotionBarcode::from_string("10110", 2));
  sig.barcodes.push_back(MotionBarcode::from_string("01111", 7));

  std::ostringstream out;
  write_signature(out, sig);
  CHECK(out.str() == "MBSIG 1 cam3 5 2 9 1\n2 10110\n7 01111\n");

  std::istringstream in(out.str());
  const auto back = read_signature(in, "mem");
  CHECK(back.clip_id == "cam3");
  CHECK(back.frame_count == 5);
  CHECK(back.region_count == 9);
  CHECK(back.low_motion);
  REQUIRE(back.barcodes.size() == 2);
  CHECK(back.barcodes[1] == sig.barcodes[1]);
  CHECK(back.barcodes[1].source_id() == 7);

  auto expect_line = [](const std::string& text, std::size_t line) {
    std::istringstream bad(text);
    try {
      (void)read_signature(bad, "bad.sig");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_line("MBSIG 2 a 5 0 0 0\n", 1);
  expect_line("MBSIG 1 a 5 1 3 0\n", 2);
  expect_line("MBSIG 1 a 5 2 3 0\n4 10101\n4 10101\n", 3);
  expect_line("MBSIG 1 a 5 1 3 0\n4 1010\n", 2);
  expect_line("MBSIG 1 a 5 1 3 0\n4 10201\n", 2);
  expect_line("MBSIG 1 a 5 1 3 2\n", 1);
}

TEST_CASE("signature files and directories") {
  mb_test::TempDir dir;
  ClipSignature a{"a", 3, {MotionBarcode::from_string("110", 0)}, 1, false};
  ClipSignature b{"b", 3, {}, 4, true};
  write_signature_file(dir / "b.sig", b);
  write_signature_file(dir / "a.sig", a);
  const auto all = read_signature_dir(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].clip_id == "a");
  CHECK(all[1].clip_id == "b");
  CHECK(all[1].barcodes.empty());
}
