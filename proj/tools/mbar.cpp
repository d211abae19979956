// mbar: command-line front end for the motion barcode pipeline.
//
//   mbar detect    FRAMES_MANIFEST -o DIR
//   mbar signature MASKS_MANIFEST -o FILE.sig
//   mbar query     SIG_DIR QUERY.sig
//   mbar eval      SIG_DIR RELEVANCE [--results FILE]
//   mbar sweep     SIG_DIR RELEVANCE --param threshold|length --values A:B:STEP|V1,V2,...
//   mbar sweep     MASK_ROOT RELEVANCE --param regions --values ...
//   mbar synth     OUT_DIR [--scenes --views --distractors --seed --noise --occluder --frames]
//
// Settings layer as built-in defaults < --config file < flags. Usage errors
// exit with 2, pipeline errors with 1.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "motion_barcode/config.hpp"
#include "motion_barcode/errors.hpp"
#include "motion_barcode/retrieval.hpp"
#include "motion_barcode/synth.hpp"

namespace mb = motion_barcode;
namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

// Pipeline flags shared by every subcommand, recorded as config keys so they
// can be applied after the config file.
struct SettingFlags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* app) {
    app->add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
    add_setting(app, "--detector", "detector", "vibe or framediff")->check(CLI::IsMember({"vibe", "framediff"}));
    add_setting(app, "--threshold", "threshold", "heuristic correlation threshold (default 0.4)");
    add_setting(app, "--regions", "regions", "target superpixel count (default 1000)");
    add_setting(app, "--min-motion", "min_motion", "minimum moving fraction of a barcode (default 0.1)");
    add_setting(app, "--min-barcodes", "min_barcodes", "low-motion flag below this count (default 100)");
    add_setting(app, "--method", "method", "heuristic or assignment")->check(CLI::IsMember({"heuristic", "assignment"}));
    add_setting(app, "--seed", "seed", "background model seed (default 0)");
  }

  CLI::Option* add_setting(CLI::App* app, const std::string& flag, std::string key, const std::string& help) {
    return app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
  }

  mb::PipelineConfig resolve() const {
    mb::PipelineConfig config;
    if (!config_file.empty()) mb::apply_config_file(config, config_file);
    for (const auto& [key, value] : values) mb::apply_setting(config, key, value);
    config.validate();
    return config;
  }
};

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const auto second = text.find(':', colon + 1);
    if (second == std::string::npos) throw CLI::ValidationError("--values", "expected A:B:STEP");
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1, second - colon - 1));
    const double step = std::stod(text.substr(second + 1));
    if (!(step > 0.0) || hi < lo) throw CLI::ValidationError("--values", "need STEP > 0 and A <= B");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Snap to the 1e-9 grid so 0.1 * 3 prints as 0.300000.
      values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
    return values;
  }
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  if (values.empty()) throw CLI::ValidationError("--values", "no values given");
  return values;
}

std::vector<double> parse_values(const std::string& text) {
  try {
    return parse_value_list(text);
  } catch (const std::logic_error&) {  // std::stod on non-numeric text
    throw CLI::ValidationError("--values", "cannot parse '" + text + "'");
  }
}

// Mask manifests of a corpus: every <dir>/masks/<name>.txt below root.
std::vector<fs::path> find_mask_manifests(const fs::path& root) {
  std::vector<fs::path> found;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".txt" && e.path().parent_path().filename() == "masks") {
      found.push_back(e.path());
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

void report_low_motion(const std::vector<mb::RankedResult>& results) {
  double low_sum = 0.0, other_sum = 0.0;
  std::size_t low = 0;
  for (const auto& r : results) {
    if (r.low_motion) {
      ++low;
      low_sum += r.average_precision;
    } else {
      other_sum += r.average_precision;
    }
  }
  if (low == 0) return;
  const std::size_t other = results.size() - low;
  std::fprintf(stderr, "low-motion queries: %zu of %zu, mean AP %.6f", low, results.size(), low_sum / low);
  if (other > 0) std::fprintf(stderr, " (others %.6f)", other_sum / other);
  std::fprintf(stderr, "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion barcode video retrieval"};
  app.require_subcommand(1);
  SettingFlags settings;

  auto* detect = app.add_subcommand("detect", "Frames manifest -> motion masks");
  std::string frames_manifest, mask_dir;
  detect->add_option("frames", frames_manifest, "frames manifest")->required();
  detect->add_option("-o,--out", mask_dir, "output directory for masks")->required();
  settings.add(detect);

  auto* signature = app.add_subcommand("signature", "Mask manifest -> MBSIG signature file");
  std::string masks_manifest, sig_out, labels_out;
  signature->add_option("masks", masks_manifest, "mask manifest")->required();
  signature->add_option("-o,--out", sig_out, "signature file to write")->required();
  signature->add_option("--labels", labels_out, "also write the superpixel label map (.pgm or .raw)");
  settings.add(signature);

  auto* query = app.add_subcommand("query", "Rank a signature directory against one query signature");
  std::string query_dir, query_file;
  query->add_option("index", query_dir, "directory of .sig files")->required()->check(CLI::ExistingDirectory);
  query->add_option("query", query_file, "query .sig file")->required()->check(CLI::ExistingFile);
  settings.add(query);

  auto* eval = app.add_subcommand("eval", "Per-query AP and mean AP over a signature directory");
  std::string eval_dir, eval_relevance, results_out;
  eval->add_option("index", eval_dir, "directory of .sig files")->required()->check(CLI::ExistingDirectory);
  eval->add_option("relevance", eval_relevance, "relevance file")->required()->check(CLI::ExistingFile);
  eval->add_option("--results", results_out, "also write the full ranking CSV here");
  settings.add(eval);

  auto* sweep = app.add_subcommand("sweep", "Mean AP as a function of one parameter");
  std::string sweep_input, sweep_relevance, sweep_param, sweep_values;
  sweep->add_option("input", sweep_input, "directory of .sig files (mask corpus root for regions)")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep->add_option("relevance", sweep_relevance, "relevance file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_param, "threshold, length or regions")
      ->required()
      ->check(CLI::IsMember({"threshold", "length", "temporal_length", "regions", "region_count"}));
  sweep->add_option("--values", sweep_values, "A:B:STEP (inclusive) or a comma-separated list")->required();
  settings.add(sweep);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-view corpus");
  std::string synth_out;
  mb::CorpusParams corpus;
  bool emit_frames = false;
  synth->add_option("out", synth_out, "output directory")->required();
  synth->add_option("--scenes", corpus.scenes, "event scenes")->capture_default_str();
  synth->add_option("--views", corpus.views_per_scene, "views per scene (2-8)")->capture_default_str();
  synth->add_option("--distractors", corpus.distractors, "single-view distractor clips")->capture_default_str();
  synth->add_option("--seed", corpus.seed, "generator seed")->capture_default_str();
  synth->add_option("--noise", corpus.noise_p, "per-pixel bit flip probability")->capture_default_str();
  synth->add_option("--occluder", corpus.occluder_fraction, "max canvas fraction of one occluder per view")
      ->capture_default_str();
  synth->add_option("--frames", corpus.scene.duration, "frames per clip")->capture_default_str();
  synth->add_flag("--emit-frames", emit_frames, "also render grayscale frames for the detectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*synth) {
      const auto files = mb::generate_corpus(synth_out, corpus, emit_frames);
      std::printf("%zu clips, relevance %s\n", files.mask_manifests.size(), files.relevance.string().c_str());
      return 0;
    }

    const auto config = settings.resolve();

    if (*detect) {
      const auto frames = mb::load_frame_sequence(frames_manifest);
      const auto manifest = mb::write_mask_sequence(mb::detect(frames, config), mask_dir);
      std::printf("%s\n", manifest.string().c_str());
    } else if (*signature) {
      const auto masks = mb::load_mask_sequence(masks_manifest);
      const auto image = mb::compute_motion_image(masks);
      const auto labels = mb::slic_segment(image, config.signature.slic);
      const auto sig = mb::build_signature(masks, labels, config.signature.min_motion_fraction,
                                           config.signature.min_barcodes);
      mb::write_signature_file(sig_out, sig);
      if (!labels_out.empty()) {
        if (fs::path(labels_out).extension() == ".raw") {
          mb::write_label_raw(labels_out, labels);
        } else {
          mb::write_label_pgm(labels_out, labels);
        }
      }
      if (sig.low_motion) {
        std::fprintf(stderr, "%s: low motion (%zu barcodes < %zu)\n", sig.clip_id.c_str(), sig.size(),
                     config.signature.min_barcodes);
      }
    } else if (*query) {
      const auto index = mb::build_index(mb::read_signature_dir(query_dir));
      const auto q = mb::read_signature_file(query_file);
      const auto ranking = mb::query(index, q, config.query);
      std::printf("query_id,rank,clip_id,score\n");
      for (std::size_t k = 0; k < ranking.size(); ++k) {
        std::printf("%s,%zu,%s,%.6f\n", q.clip_id.c_str(), k + 1, ranking[k].clip_id.c_str(), ranking[k].score);
      }
    } else if (*eval) {
      const auto index = mb::build_index(mb::read_signature_dir(eval_dir));
      const auto results = mb::evaluate(index, mb::read_relevance_file(eval_relevance), config.query);
      if (!results_out.empty()) {
        std::ofstream out(results_out, std::ios::binary);
        if (!out) throw mb::IoError("cannot write " + results_out);
        mb::write_results_csv(out, results);
      }
      mb::write_summary_csv(std::cout, results);
      report_low_motion(results);
    } else if (*sweep) {
      const auto parameter = mb::parse_sweep_parameter(sweep_param);
      const auto values = parse_values(sweep_values);
      const auto relevance = mb::read_relevance_file(sweep_relevance);
      std::vector<mb::SweepRow> rows;
      if (parameter == mb::SweepParameter::region_count) {
        std::vector<mb::MotionMaskSequence> clips;
        for (const auto& m : find_mask_manifests(sweep_input)) clips.push_back(mb::load_mask_sequence(m));
        if (clips.empty()) throw mb::InvalidArgument("no masks/<clip>.txt manifests under " + sweep_input);
        rows = mb::sweep_region_count(clips, relevance, values, config.query, config.signature);
      } else {
        const auto index = mb::build_index(mb::read_signature_dir(sweep_input));
        rows = mb::sweep(index, relevance, parameter, values, config.query, config.signature);
      }
      mb::write_sweep_csv(std::cout, parameter, rows);
    }
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "mbar: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mbar: error: %s\n", e.what());
    return kRunError;
  }
  return 0;
}
