#pragma once

// Experiment grid: segmenter x method version x top_k, each cell run R
// times over every annotated (image, class) instance of a corpus.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mindful/explainer.hpp"
#include "mindful/harness/corpus.hpp"
#include "mindful/segmentation.hpp"

namespace mindful::harness {

struct MethodVersion {
  SamplerMethod method = SamplerMethod::mindful;
  int levels = 2;              // mindful
  std::size_t samples = 1000;  // random baseline

  // "mindful:2", "random:1000" (also "random-baseline:N").
  static MethodVersion parse(const std::string& text);
  std::string algorithm() const { return to_string(method); }
  std::string version() const;  // "levels-2", "samples-1000"
};

enum class MaskMode { raw, bbox };
std::string to_string(MaskMode m);
MaskMode parse_mask_mode(const std::string& s);

struct BenchmarkConfig {
  std::vector<SegmenterConfig> segmenters;
  std::vector<MethodVersion> versions;
  std::vector<std::size_t> top_k = {1, 4};
  int runs = 10;
  std::uint64_t base_seed = 0;  // baseline run r uses base_seed + r
  double bernoulli_p = 0.5;
  bool dedupe_masks = false;
  SurrogateConfig surrogate;
  MaskMode mask_mode = MaskMode::raw;
  // Mindful thresholds: override, then table, then 0.5.
  std::optional<double> threshold_override;
  std::optional<ThresholdTable> thresholds;

  void validate() const;
  std::size_t cell_count() const { return segmenters.size() * versions.size() * top_k.size(); }
};

struct InstanceResult {
  std::string segmenter;
  std::string algorithm;
  std::string version;
  std::size_t top_k = 0;
  std::string image_id;
  std::string class_id;
  std::size_t runs = 0;
  double stability_pairwise = 0.0;
  double mean_gt_iou = 0.0;
  double localization_precision = 0.0;  // mean over runs
  std::size_t superpixels = 0;
  double samples = 0.0;                 // mean over runs
  double runtime_seconds = 0.0;         // mean over runs
  std::size_t empty_runs = 0;           // runs with an empty explanation
};

struct BenchmarkRow {
  std::string segmenter;
  std::string algorithm;
  std::string version;
  std::size_t top_k = 0;
  std::size_t instances = 0;
  std::size_t runs = 0;
  double avg_superpixels = 0.0;
  double avg_runtime_seconds = 0.0;
  double avg_samples = 0.0;
  double stability_pairwise = 0.0;
  double mean_gt_iou = 0.0;
  double mean_localization_precision = 0.0;
};

struct CellError {
  std::string segmenter;
  std::string algorithm;
  std::string version;
  std::size_t top_k = 0;
  std::string message;
  bool classifier_failure = false;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::vector<InstanceResult> instances;
  std::vector<CellError> errors;
  Warnings warnings;  // de-duplicated
  std::size_t cell_count = 0;
};

BenchmarkReport run_benchmark(const Corpus& corpus, const Classifier& classifier,
                              const BenchmarkConfig& cfg);

// benchmark.csv, stability.csv, errors.csv, summary.json and three SVG
// charts, all written atomically into `dir`.
void write_benchmark(const BenchmarkReport& report, const std::string& dir);

std::string benchmark_csv(const BenchmarkReport& report);
std::string stability_csv(const BenchmarkReport& report);
std::string errors_csv(const BenchmarkReport& report);

extern const std::vector<std::string> kBenchmarkHeader;
extern const std::vector<std::string> kStabilityHeader;
extern const std::vector<std::string> kErrorsHeader;

}  // namespace mindful::harness
