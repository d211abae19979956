#include <sstream>

#include "doctest.h"
#include "motion_barcode/errors.hpp"
#include "motion_barcode/retrieval.hpp"
#include "motion_barcode/synth.hpp"

using namespace motion_barcode;

namespace {

ClipSignature sig(const std::string& id, const std::vector<std::string>& barcodes, std::size_t n = 0) {
  ClipSignature s;
  s.clip_id = id;
  s.frame_count = barcodes.empty() ? n : barcodes.front().size();
  for (std::size_t i = 0; i < barcodes.size(); ++i) {
    s.barcodes.push_back(MotionBarcode::from_string(barcodes[i], static_cast<std::int64_t>(i)));
  }
  s.region_count = static_cast<int>(barcodes.size());
  return s;
}

RankedResult with_ap(double ap) {
  RankedResult r;
  r.average_precision = ap;
  return r;
}

double corpus_mean_ap(double noise) {
  CorpusParams p;
  p.noise_p = noise;
  const auto plan = plan_corpus(p);
  std::vector<ClipSignature> sigs;
  for (const auto& c : plan.clips) sigs.push_back(signature_from_masks(render_view(plan.scenes[c.scene], c.view, c.clip_id)));
  const auto results = evaluate(SignatureIndex(std::move(sigs)), plan.relevance);
  return mean_ap(results);
}

}  // namespace

TEST_CASE("average precision examples") {
  const std::set<std::string> r{"r"};
  CHECK(average_precision(std::vector<std::string>{"r", "x", "y"}, r) == doctest::Approx(1.0));
  CHECK(average_precision(std::vector<std::string>{"x", "r", "y"}, r) == doctest::Approx(0.5));
  CHECK(average_precision(std::vector<std::string>{"r1", "x", "r2"}, {"r1", "r2"}) == doctest::Approx(5.0 / 6.0));
  CHECK(average_precision(std::vector<std::string>{"x", "y"}, r) == 0.0);
  CHECK_THROWS_AS(average_precision(std::vector<std::string>{"x"}, {}), InvalidArgument);
}

TEST_CASE("mean AP examples") {
  CHECK(mean_ap(std::vector{with_ap(0.7)}) == doctest::Approx(0.7));
  CHECK(mean_ap(std::vector{with_ap(1.0), with_ap(0.0)}) == doctest::Approx(0.5));
  CHECK(mean_ap(std::vector{with_ap(5.0 / 6.0), with_ap(0.5), with_ap(1.0)}) == doctest::Approx(7.0 / 9.0));
  CHECK(mean_ap(std::vector{with_ap(0.3), with_ap(0.3)}) == doctest::Approx(0.3));
  CHECK_THROWS_AS(mean_ap(std::vector<RankedResult>{}), InvalidArgument);
}

TEST_CASE("index construction") {
  const auto a = sig("a", {"1100"}), b = sig("b", {"1010"}), c = sig("c", {"0110"});
  const auto idx = build_index({a, b, c});
  CHECK(idx.size() == 3);
  CHECK(idx.frame_count() == 4);
  CHECK(idx.position("b") == 1);
  CHECK(idx.position("zz") == SignatureIndex::npos);
  CHECK_THROWS_AS(build_index({a, a}), InvalidArgument);
  CHECK_THROWS_AS(build_index({a, sig("long", {"11000"})}), InvalidArgument);
  CHECK(build_index({}).empty());
}

TEST_CASE("query") {
  const auto q = sig("q", {"11001010", "00110101", "01110000"});
  auto twin = q;
  twin.clip_id = "twin";

  const auto one = query(build_index({twin}), q);
  REQUIRE(one.size() == 1);
  CHECK(one[0].clip_id == "twin");
  CHECK(one[0].score == doctest::Approx(2.0));

  CHECK(query(SignatureIndex{}, q).empty());

  const auto other = sig("other", {"10000001", "00011000", "11111110"});
  const auto ranking = query(build_index({other, q, twin, sig("empty", {}, 8)}), q);
  REQUIRE(ranking.size() == 3);
  CHECK(ranking[0].clip_id == "twin");
  for (const auto& s : ranking) CHECK(s.clip_id != "q");
  // Ties are ordered by id.
  CHECK(ranking[1].score >= ranking[2].score);
  if (ranking[1].score == ranking[2].score) CHECK(ranking[1].clip_id < ranking[2].clip_id);

  QueryOptions assign{SimilarityMethod::assignment, 0.4};
  CHECK(query(build_index({twin}), q, assign)[0].score == doctest::Approx(1.0));
  CHECK(clip_similarity(q, sig("empty", {}, 8), {}) == 0.0);
}

TEST_CASE("relevance files") {
  std::istringstream in("# comment\nq1 a b\n\nq2 c\n");
  const auto rel = read_relevance(in, "rel.txt");
  REQUIRE(rel.size() == 2);
  CHECK(rel[0].relevant_ids == std::vector<std::string>{"a", "b"});
  std::ostringstream out;
  write_relevance(out, rel);
  std::istringstream again(out.str());
  const auto back = read_relevance(again, "mem");
  CHECK(back.size() == 2);
  CHECK(back[1].query_id == "q2");

  std::istringstream dup("q1 a\nq1 b\n");
  try {
    (void)read_relevance(dup, "dup.txt");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream lonely("q1\n");
  CHECK_THROWS_AS(read_relevance(lonely, "x"), FormatError);
}

TEST_CASE("evaluate and CSV output") {
  const auto a1 = sig("a1", {"11001010", "00110101"});
  auto a2 = a1;
  a2.clip_id = "a2";
  const auto d = sig("d", {"10000001", "01111110"});
  const auto idx = build_index({a1, a2, d});

  const RelevanceList rel{{"a1", {"a2", "a1"}}, {"a2", {"a1"}}};
  const auto results = evaluate(idx, rel);
  REQUIRE(results.size() == 2);
  CHECK(results[0].relevant_ids == std::set<std::string>{"a2"});
  CHECK(results[0].ranking.size() == 2);
  CHECK(results[0].average_precision == doctest::Approx(1.0));
  CHECK(mean_ap(results) == doctest::Approx(1.0));

  std::ostringstream csv;
  write_results_csv(csv, results);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "query_id,rank,clip_id,score,is_relevant");
  CHECK(first == "a1,1,a2,2.000000,1");

  std::ostringstream summary;
  write_summary_csv(summary, results);
  CHECK(summary.str() == "query_id,ap\na1,1.000000\na2,1.000000\nmean_ap,1.000000\n");

  CHECK_THROWS_AS(evaluate(idx, {{"missing", {"a1"}}}), InvalidArgument);
}

TEST_CASE("sweeps") {
  const auto a1 = sig("a1", {"1100101011", "0011010100"});
  auto a2 = a1;
  a2.clip_id = "a2";
  const auto idx = build_index({a1, a2, sig("d", {"1000000111", "0111111000"})});
  const RelevanceList rel{{"a1", {"a2"}}};

  const std::vector<double> thresholds{0.2, 0.4, 0.6};
  const auto rows = sweep(idx, rel, SweepParameter::threshold, thresholds);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].value == 0.4);

  const std::vector<double> lengths{4, 10};
  CHECK(sweep(idx, rel, SweepParameter::temporal_length, lengths).size() == 2);
  const std::vector<double> too_long{11};
  CHECK_THROWS_AS(sweep(idx, rel, SweepParameter::temporal_length, too_long), InvalidArgument);
  const std::vector<double> bad_thr{1.5};
  CHECK_THROWS_AS(sweep(idx, rel, SweepParameter::threshold, bad_thr), InvalidArgument);
  CHECK_THROWS_AS(sweep(idx, rel, SweepParameter::threshold, std::vector<double>{}), InvalidArgument);

  std::ostringstream out;
  write_sweep_csv(out, SweepParameter::threshold, rows);
  CHECK(out.str().rfind("threshold,mean_ap\n0.200000,", 0) == 0);

  CHECK(parse_sweep_parameter("length") == SweepParameter::temporal_length);
  CHECK(parse_sweep_parameter("regions") == SweepParameter::region_count);
  CHECK_THROWS_AS(parse_sweep_parameter("speed"), InvalidArgument);

  const auto cut = truncate_signature(a1, 4, SignatureParams{});
  CHECK(cut.frame_count == 4);
  for (const auto& b : cut.barcodes) CHECK(b.size() == 4);
}

TEST_CASE("mean AP does not increase with noise on the synthetic corpus") {
  const double clean = corpus_mean_ap(0.0);
  const double mild = corpus_mean_ap(0.1);
  const double heavy = corpus_mean_ap(0.3);
  CHECK(clean == doctest::Approx(1.0));
  CHECK(mild <= clean);
  CHECK(heavy <= mild);
}
