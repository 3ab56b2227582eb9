#pragma once

// End-to-end explanation of one image: sampling (graph-guided or random),
// surrogate fitting and superpixel selection, per target class.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mindful/graph.hpp"
#include "mindful/mindful_sampler.hpp"
#include "mindful/random_sampler.hpp"
#include "mindful/surrogate.hpp"

namespace mindful {

enum class SamplerMethod { mindful, random_baseline };

std::string to_string(SamplerMethod m);
SamplerMethod parse_method(const std::string& name);

struct ExplainOptions {
  SamplerMethod method = SamplerMethod::mindful;
  MindfulConfig mindful;
  RandomSamplerConfig random;
  SurrogateConfig surrogate;
  std::size_t top_k = 4;
};

struct ClassExplanation {
  ExplanationResult result;
  double threshold = 0.0;        // mindful only
  double base_probability = 0.0; // probability of the class on the unmasked image
  SampleTable table;             // mindful only
};

// Explains one class. Runtime covers sampling and fitting only.
ClassExplanation explain_class(const ImageBuffer& image, const SegmentMap& segmap,
                               const std::string& class_id, const Classifier& classifier,
                               const ExplainOptions& options);

struct ThresholdSource {
  const ThresholdTable* table = nullptr;
  std::optional<double> override_value;

  // Override first, then the table, then 0.5 with a warning.
  double resolve(const std::string& class_id, Warnings* warnings) const;
};

// One explanation per class among the top k_classes predictions on the
// unmasked image. The random baseline shares one mask set across classes.
std::vector<ClassExplanation> explain_top_classes(const ImageBuffer& image, const SegmentMap& segmap,
                                                  const Classifier& classifier, std::size_t k_classes,
                                                  const ExplainOptions& options,
                                                  const ThresholdSource& thresholds,
                                                  Warnings* warnings = nullptr);

// Run-length encoding of a pixel mask: row-major runs alternating between
// 0 and 1, starting with a (possibly empty) run of zeros.
nlohmann::ordered_json mask_to_rle(const BinaryPixelMask& mask);
BinaryPixelMask mask_from_rle(const nlohmann::json& rle);

struct ExplanationFile {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::string segmenter;
  std::string method;
  std::size_t segment_count = 0;
  std::vector<ClassExplanation> explanations;
};

nlohmann::ordered_json explanation_to_json(const ClassExplanation& e, SamplerMethod method);
nlohmann::ordered_json explanation_file_to_json(const ExplanationFile& file);

// Only the fields needed for evaluation are restored.
struct LoadedExplanation {
  std::string image_id;
  std::string class_id;
  std::string method;
  std::vector<SegmentId> selected;
  BinaryPixelMask pixel_mask;
  bool empty_warning = false;
};

std::vector<LoadedExplanation> load_explanation_file(const std::string& path);

}  // namespace mindful
