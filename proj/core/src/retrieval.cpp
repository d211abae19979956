#include "motion_barcode/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "motion_barcode/errors.hpp"

namespace motion_barcode {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void sort_ranking(std::vector<ScoredClip>& ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const ScoredClip& a, const ScoredClip& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.clip_id < b.clip_id;
  });
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

SignatureIndex::SignatureIndex(std::vector<ClipSignature> signatures) : entries_(std::move(signatures)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& sig = entries_[i];
    if (sig.frame_count != entries_.front().frame_count) {
      throw InvalidArgument("clip '" + sig.clip_id + "' has N=" + std::to_string(sig.frame_count) +
                            ", index has N=" + std::to_string(entries_.front().frame_count));
    }
    if (!lookup_.emplace(sig.clip_id, i).second) throw InvalidArgument("duplicate clip_id '" + sig.clip_id + "'");
  }
}

std::size_t SignatureIndex::position(std::string_view clip_id) const {
  const auto it = lookup_.find(clip_id);
  return it == lookup_.end() ? npos : it->second;
}

SignatureIndex build_index(std::vector<ClipSignature> signatures) { return SignatureIndex(std::move(signatures)); }

double clip_similarity(const ClipSignature& a, const ClipSignature& b, const QueryOptions& options) {
  if (a.barcodes.empty() || b.barcodes.empty()) return 0.0;
  return options.method == SimilarityMethod::heuristic ? heuristic_similarity(a, b, options.threshold).value
                                                       : assignment_similarity(a, b).value;
}

std::vector<ScoredClip> query(const SignatureIndex& index, const ClipSignature& q, const QueryOptions& options) {
  if (!index.empty() && q.frame_count != index.frame_count()) {
    throw InvalidArgument("query N=" + std::to_string(q.frame_count) + " differs from index N=" +
                          std::to_string(index.frame_count()));
  }
  std::vector<ScoredClip> ranking;
  ranking.reserve(index.size());
  for (const auto& entry : index.entries()) {
    if (entry.clip_id == q.clip_id) continue;
    ranking.push_back({entry.clip_id, clip_similarity(q, entry, options)});
  }
  sort_ranking(ranking);
  return ranking;
}

double average_precision(std::span<const std::string> ranking, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw InvalidArgument("relevant set is empty");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (!relevant.contains(ranking[k])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

double average_precision(std::span<const ScoredClip> ranking, const std::set<std::string>& relevant) {
  std::vector<std::string> ids;
  ids.reserve(ranking.size());
  for (const auto& r : ranking) ids.push_back(r.clip_id);
  return average_precision(ids, relevant);
}

double mean_ap(std::span<const RankedResult> results) {
  if (results.empty()) throw InvalidArgument("mean_ap of an empty result list");
  double sum = 0.0;
  for (const auto& r : results) sum += r.average_precision;
  return sum / static_cast<double>(results.size());
}

RelevanceList read_relevance(std::istream& in, const std::string& source) {
  RelevanceList list;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    RelevanceEntry entry;
    if (!(row >> entry.query_id)) continue;
    for (std::string id; row >> id;) entry.relevant_ids.push_back(id);
    if (entry.relevant_ids.empty()) throw FormatError(source, lineno, "query without relevant ids");
    if (!seen.insert(entry.query_id).second) throw FormatError(source, lineno, "duplicate query '" + entry.query_id + "'");
    list.push_back(std::move(entry));
  }
  return list;
}

RelevanceList read_relevance_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_relevance(in, path.string());
}

void write_relevance(std::ostream& out, const RelevanceList& relevance) {
  for (const auto& e : relevance) {
    out << e.query_id;
    for (const auto& r : e.relevant_ids) out << ' ' << r;
    out << '\n';
  }
}

std::vector<RankedResult> evaluate(const SignatureIndex& index, const RelevanceList& relevance,
                                   const QueryOptions& options) {
  // Both similarity measures are symmetric, so each unordered pair is scored once.
  const std::size_t n = index.size();
  std::vector<double> cache(n * n, std::numeric_limits<double>::quiet_NaN());
  auto score = [&](std::size_t i, std::size_t j) {
    const std::size_t a = std::min(i, j), b = std::max(i, j);
    double& slot = cache[a * n + b];
    if (std::isnan(slot)) slot = clip_similarity(index.entries()[a], index.entries()[b], options);
    return slot;
  };

  std::vector<RankedResult> results;
  results.reserve(relevance.size());
  for (const auto& entry : relevance) {
    const std::size_t qi = index.position(entry.query_id);
    if (qi == SignatureIndex::npos) throw InvalidArgument("query '" + entry.query_id + "' is not in the index");
    RankedResult r;
    r.query_id = entry.query_id;
    r.relevant_ids.insert(entry.relevant_ids.begin(), entry.relevant_ids.end());
    r.relevant_ids.erase(entry.query_id);
    if (r.relevant_ids.empty()) throw InvalidArgument("query '" + entry.query_id + "' lists only itself as relevant");
    r.low_motion = index.entries()[qi].low_motion;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == qi) continue;
      r.ranking.push_back({index.entries()[j].clip_id, score(qi, j)});
    }
    sort_ranking(r.ranking);
    r.average_precision = average_precision(r.ranking, r.relevant_ids);
    results.push_back(std::move(r));
  }
  return results;
}

void write_results_csv(std::ostream& out, std::span<const RankedResult> results) {
  out << "query_id,rank,clip_id,score,is_relevant\n";
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.ranking.size(); ++k) {
      const auto& item = r.ranking[k];
      out << r.query_id << ',' << (k + 1) << ',' << item.clip_id << ',' << fixed6(item.score) << ','
          << (r.relevant_ids.contains(item.clip_id) ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const RankedResult> results) {
  out << "query_id,ap\n";
  for (const auto& r : results) out << r.query_id << ',' << fixed6(r.average_precision) << '\n';
  out << "mean_ap," << fixed6(mean_ap(results)) << '\n';
}

std::string_view to_string(SweepParameter parameter) noexcept {
  switch (parameter) {
    case SweepParameter::threshold: return "threshold";
    case SweepParameter::temporal_length: return "temporal_length";
    case SweepParameter::region_count: return "region_count";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "threshold") return SweepParameter::threshold;
  if (name == "temporal_length" || name == "length") return SweepParameter::temporal_length;
  if (name == "region_count" || name == "regions") return SweepParameter::region_count;
  throw InvalidArgument("unknown sweep parameter '" + std::string(name) + "'");
}

ClipSignature truncate_signature(const ClipSignature& sig, std::size_t length, const SignatureParams& params) {
  if (length < 1 || length > sig.frame_count) {
    throw InvalidArgument("temporal length " + std::to_string(length) + " outside [1, " +
                          std::to_string(sig.frame_count) + "]");
  }
  ClipSignature out;
  out.clip_id = sig.clip_id;
  out.frame_count = length;
  out.region_count = sig.region_count;
  std::vector<MotionBarcode> cut;
  cut.reserve(sig.barcodes.size());
  for (const auto& b : sig.barcodes) cut.push_back(b.prefix(length));
  out.barcodes = filter_barcodes(cut, params.min_motion_fraction);
  out.low_motion = !sufficient_motion(out.barcodes.size(), params.min_barcodes);
  return out;
}

std::vector<SweepRow> sweep(const SignatureIndex& index, const RelevanceList& relevance, SweepParameter parameter,
                            std::span<const double> values, const QueryOptions& options,
                            const SignatureParams& signature_params) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  if (parameter == SweepParameter::region_count) {
    throw InvalidArgument("region_count sweeps rebuild signatures from masks; use sweep_region_count");
  }
  for (double v : values) {
    if (parameter == SweepParameter::threshold && !(v >= -1.0 && v <= 1.0)) {
      throw InvalidArgument("threshold " + fixed6(v) + " outside [-1, 1]");
    }
    if (parameter == SweepParameter::temporal_length &&
        (!is_integral(v) || v < 1.0 || v > static_cast<double>(index.frame_count()))) {
      throw InvalidArgument("temporal length " + fixed6(v) + " outside [1, " + std::to_string(index.frame_count()) + "]");
    }
  }

  std::vector<SweepRow> rows;
  for (double v : values) {
    std::vector<RankedResult> results;
    if (parameter == SweepParameter::threshold) {
      QueryOptions o = options;
      o.threshold = v;
      results = evaluate(index, relevance, o);
    } else {
      std::vector<ClipSignature> cut;
      cut.reserve(index.size());
      for (const auto& sig : index.entries()) {
        cut.push_back(truncate_signature(sig, static_cast<std::size_t>(v), signature_params));
      }
      results = evaluate(SignatureIndex(std::move(cut)), relevance, options);
    }
    rows.push_back({v, mean_ap(results)});
  }
  return rows;
}

std::vector<SweepRow> sweep_region_count(std::span<const MotionMaskSequence> clips, const RelevanceList& relevance,
                                         std::span<const double> values, const QueryOptions& options,
                                         const SignatureParams& signature_params) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  for (double v : values) {
    if (!is_integral(v) || v < 1.0) throw InvalidArgument("region count " + fixed6(v) + " must be a positive integer");
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    SignatureParams params = signature_params;
    params.slic.target_regions = static_cast<int>(v);
    std::vector<ClipSignature> sigs;
    sigs.reserve(clips.size());
    for (const auto& masks : clips) sigs.push_back(signature_from_masks(masks, params));
    rows.push_back({v, mean_ap(evaluate(SignatureIndex(std::move(sigs)), relevance, options))});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepParameter parameter, std::span<const SweepRow> rows) {
  out << to_string(parameter) << ",mean_ap\n";
  for (const auto& r : rows) out << fixed6(r.value) << ',' << fixed6(r.mean_ap) << '\n';
}

}  // namespace motion_barcode
