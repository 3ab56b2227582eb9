#include "mindful/explainer.hpp"

#include <chrono>
#include <fstream>

namespace mindful {

std::string to_string(SamplerMethod m) {
  return m == SamplerMethod::mindful ? "mindful" : "random-baseline";
}

SamplerMethod parse_method(const std::string& name) {
  if (name == "mindful") return SamplerMethod::mindful;
  if (name == "random-baseline" || name == "random" || name == "lime")
    return SamplerMethod::random_baseline;
  throw ContractViolation("unknown method '" + name + "'");
}

double ThresholdSource::resolve(const std::string& class_id, Warnings* warnings) const {
  if (override_value) return *override_value;
  if (table != nullptr) {
    if (auto v = table->find(class_id)) return *v;
  }
  warn(warnings, "no threshold for class " + class_id + ", using 0.5");
  return kFallbackThreshold;
}

namespace {

using Clock = std::chrono::steady_clock;

ExplanationResult fit_mindful(const SampleTable& table, const MaskRenderer& renderer,
                              const std::string& class_id, const Classifier& classifier,
                              const ExplainOptions& options) {
  const SampleTable used = options.mindful.dedupe_masks ? dedupe_by_mask(table) : table;
  std::vector<MaskVector> masks;
  std::vector<double> responses;
  masks.reserve(used.size());
  responses.reserve(used.size());
  for (const auto& rec : used) {
    masks.push_back(rec.value);
    responses.push_back(rec.probability);
  }
  return explain(masks, std::span<const double>(responses), renderer, class_id, classifier,
                 options.top_k, options.surrogate);
}

}  // namespace

ClassExplanation explain_class(const ImageBuffer& image, const SegmentMap& segmap,
                               const std::string& class_id, const Classifier& classifier,
                               const ExplainOptions& options) {
  if (!classifier.has_class(class_id))
    throw ContractViolation("explain: unknown class '" + class_id + "'");
  ClassExplanation out;
  out.base_probability = classifier.predict(image).at(class_id);
  const MaskRenderer renderer(image, segmap);
  const auto start = Clock::now();
  if (options.method == SamplerMethod::mindful) {
    out.threshold = options.mindful.threshold;
    out.table = generate(build_graph(segmap), static_cast<std::size_t>(segmap.segment_count()),
                         options.mindful,
                         make_decision_function(renderer, classifier, class_id,
                                                options.mindful.threshold));
    out.result = fit_mindful(out.table, renderer, class_id, classifier, options);
  } else {
    const auto masks = generate_random(static_cast<std::size_t>(segmap.segment_count()), options.random);
    out.result = explain(masks, std::nullopt, renderer, class_id, classifier, options.top_k,
                         options.surrogate);
  }
  out.result.method = to_string(options.method);
  out.result.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::vector<ClassExplanation> explain_top_classes(const ImageBuffer& image, const SegmentMap& segmap,
                                                  const Classifier& classifier, std::size_t k_classes,
                                                  const ExplainOptions& options,
                                                  const ThresholdSource& thresholds,
                                                  Warnings* warnings) {
  if (k_classes < 1) throw ContractViolation("explain: k_classes must be >= 1");
  const ClassifierOutput base = classifier.predict(image);
  const auto targets = top_k_classes(base, k_classes);
  if (targets.size() < k_classes)
    warn(warnings, "classifier has only " + std::to_string(targets.size()) + " classes; " +
                       "explaining all of them");

  std::vector<ClassExplanation> results;
  if (options.method == SamplerMethod::mindful) {
    for (const auto& class_id : targets) {
      ExplainOptions per_class = options;
      per_class.mindful.threshold = thresholds.resolve(class_id, warnings);
      results.push_back(explain_class(image, segmap, class_id, classifier, per_class));
    }
    return results;
  }

  // Shared masks; each perturbed image is classified once for all classes.
  const MaskRenderer renderer(image, segmap);
  const auto start = Clock::now();
  const auto masks = generate_random(static_cast<std::size_t>(segmap.segment_count()), options.random);
  std::vector<ClassifierOutput> outputs;
  outputs.reserve(masks.size());
  for (const auto& m : masks) outputs.push_back(classifier.predict(renderer.render(m)));
  const double sampling = std::chrono::duration<double>(Clock::now() - start).count();
  for (const auto& class_id : targets) {
    const auto fit_start = Clock::now();
    std::vector<double> responses;
    responses.reserve(outputs.size());
    for (const auto& o : outputs) responses.push_back(o.at(class_id));
    ClassExplanation e;
    e.base_probability = base.at(class_id);
    e.result = explain(masks, std::span<const double>(responses), renderer, class_id, classifier,
                       options.top_k, options.surrogate);
    e.result.method = to_string(options.method);
    e.result.runtime_seconds =
        sampling + std::chrono::duration<double>(Clock::now() - fit_start).count();
    results.push_back(std::move(e));
  }
  return results;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::ordered_json mask_to_rle(const BinaryPixelMask& mask) {
  nlohmann::ordered_json j;
  j["width"] = mask.width();
  j["height"] = mask.height();
  std::vector<std::size_t> counts;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (auto b : mask.bits()) {
    if (b == current) {
      ++run;
    } else {
      counts.push_back(run);
      current = b;
      run = 1;
    }
  }
  counts.push_back(run);
  j["counts"] = counts;
  return j;
}

BinaryPixelMask mask_from_rle(const nlohmann::json& rle) {
  try {
    const int w = rle.at("width").get<int>();
    const int h = rle.at("height").get<int>();
    if (w < 0 || h < 0) throw FormatError("rle: negative dimensions");
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    std::uint8_t value = 0;
    for (const auto& c : rle.at("counts")) {
      const auto n = c.get<std::size_t>();
      if (bits.size() + n > static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
        throw FormatError("rle: runs exceed mask size");
      bits.insert(bits.end(), n, value);
      value ^= 1;
    }
    if (bits.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
      throw FormatError("rle: runs do not cover the mask");
    return BinaryPixelMask(w, h, std::move(bits));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("rle: ") + e.what());
  }
}

nlohmann::ordered_json explanation_to_json(const ClassExplanation& e, SamplerMethod method) {
  const ExplanationResult& r = e.result;
  nlohmann::ordered_json j;
  j["class_id"] = r.class_id;
  j["method"] = to_string(method);
  j["base_probability"] = e.base_probability;
  if (method == SamplerMethod::mindful) j["threshold"] = e.threshold;
  j["sample_count"] = r.sample_count_used;
  j["intercept"] = r.intercept;
  j["coefficients"] = r.coefficients;
  j["ranked_superpixels"] = r.ranked_superpixels;
  j["selected_superpixels"] = r.selected_top_k;
  j["negative_superpixels"] = r.negative_superpixels;
  j["warnings"] = r.warnings;
  j["pixel_mask_rle"] = mask_to_rle(r.explanation_pixel_mask);
  return j;
}

nlohmann::ordered_json explanation_file_to_json(const ExplanationFile& file) {
  nlohmann::ordered_json j;
  j["image_id"] = file.image_id;
  j["width"] = file.width;
  j["height"] = file.height;
  j["segmenter"] = file.segmenter;
  j["method"] = file.method;
  j["segment_count"] = file.segment_count;
  j["explanations"] = nlohmann::ordered_json::array();
  const SamplerMethod m = parse_method(file.method);
  for (const auto& e : file.explanations) j["explanations"].push_back(explanation_to_json(e, m));
  return j;
}

std::vector<LoadedExplanation> load_explanation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    std::vector<LoadedExplanation> out;
    const std::string image_id = j.at("image_id").get<std::string>();
    for (const auto& e : j.at("explanations")) {
      LoadedExplanation le;
      le.image_id = image_id;
      le.class_id = e.at("class_id").get<std::string>();
      le.method = e.value("method", j.value("method", std::string()));
      le.selected = e.at("selected_superpixels").get<std::vector<SegmentId>>();
      le.pixel_mask = mask_from_rle(e.at("pixel_mask_rle"));
      le.empty_warning = le.pixel_mask.count() == 0;
      out.push_back(std::move(le));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace mindful
