#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motion_barcode/pooling.hpp"
#include "motion_barcode/similarity.hpp"

namespace motion_barcode {

/// Immutable collection of clip signatures sharing one frame count.
class SignatureIndex {
 public:
  SignatureIndex() = default;

  /// Throws InvalidArgument on duplicate clip ids or mixed frame counts.
  explicit SignatureIndex(std::vector<ClipSignature> signatures);

  const std::vector<ClipSignature>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// Shared frame count, 0 for an empty index.
  std::size_t frame_count() const noexcept { return entries_.empty() ? 0 : entries_.front().frame_count; }

  /// Position of a clip, or npos.
  std::size_t position(std::string_view clip_id) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<ClipSignature> entries_;
  std::map<std::string, std::size_t, std::less<>> lookup_;
};

SignatureIndex build_index(std::vector<ClipSignature> signatures);

struct QueryOptions {
  SimilarityMethod method = SimilarityMethod::heuristic;
  double threshold = kDefaultMatchThreshold;  // heuristic only
};

struct ScoredClip {
  std::string clip_id;
  double score = 0.0;
};

/// Scalar similarity used for ranking. A pair involving an empty signature
/// scores 0.
double clip_similarity(const ClipSignature& a, const ClipSignature& b, const QueryOptions& options);

/// Scores `q` against every entry except one with the same clip id. Sorted by
/// score descending, then clip id ascending.
std::vector<ScoredClip> query(const SignatureIndex& index, const ClipSignature& q,
                              const QueryOptions& options = {});

struct RankedResult {
  std::string query_id;
  std::vector<ScoredClip> ranking;
  std::set<std::string> relevant_ids;
  double average_precision = 0.0;
  bool low_motion = false;  // the query clip was flagged low-motion
};

/// (1/|R|) * sum over ranks k holding a relevant id of (relevant in top k+1)/(k+1).
/// Throws InvalidArgument for an empty relevant set.
double average_precision(std::span<const std::string> ranking, const std::set<std::string>& relevant);
double average_precision(std::span<const ScoredClip> ranking, const std::set<std::string>& relevant);

/// Throws InvalidArgument for an empty list.
double mean_ap(std::span<const RankedResult> results);

// Relevance file: one `<query_id> <relevant_id>...` per line; `#` starts a
// comment.
struct RelevanceEntry {
  std::string query_id;
  std::vector<std::string> relevant_ids;
};
using RelevanceList = std::vector<RelevanceEntry>;

RelevanceList read_relevance(std::istream& in, const std::string& source);
RelevanceList read_relevance_file(const std::filesystem::path& path);
void write_relevance(std::ostream& out, const RelevanceList& relevance);

/// Runs every relevance query against the index. Each query must be present in
/// the index; it is excluded from its own ranking.
std::vector<RankedResult> evaluate(const SignatureIndex& index, const RelevanceList& relevance,
                                   const QueryOptions& options = {});

/// `query_id,rank,clip_id,score,is_relevant` with 1-based ranks.
void write_results_csv(std::ostream& out, std::span<const RankedResult> results);
/// `query_id,ap` rows and a final `mean_ap,<value>` line.
void write_summary_csv(std::ostream& out, std::span<const RankedResult> results);

enum class SweepParameter { threshold, temporal_length, region_count };
std::string_view to_string(SweepParameter parameter) noexcept;
SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepRow {
  double value = 0.0;
  double mean_ap = 0.0;
};

/// Threshold or temporal-length sweep over an index. Temporal-length values
/// truncate every barcode to that prefix and re-apply the motion filter from
/// `signature_params`. region_count needs masks; see sweep_region_count.
std::vector<SweepRow> sweep(const SignatureIndex& index, const RelevanceList& relevance,
                            SweepParameter parameter, std::span<const double> values,
                            const QueryOptions& options = {}, const SignatureParams& signature_params = {});

/// Rebuilds every signature at each target region count.
std::vector<SweepRow> sweep_region_count(std::span<const MotionMaskSequence> clips,
                                         const RelevanceList& relevance, std::span<const double> values,
                                         const QueryOptions& options = {},
                                         const SignatureParams& signature_params = {});

/// `<parameter>,mean_ap` header followed by one row per value.
void write_sweep_csv(std::ostream& out, SweepParameter parameter, std::span<const SweepRow> rows);

/// Signature with every barcode cut to `length` bits and re-filtered.
ClipSignature truncate_signature(const ClipSignature& sig, std::size_t length, const SignatureParams& params);

}  // namespace motion_barcode
