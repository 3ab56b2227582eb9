#include "mindful/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mindful/segmentation.hpp"

namespace mindful {

std::vector<ClassifierOutput> Classifier::predict_batch(std::span<const ImageBuffer> images) const {
  std::vector<ClassifierOutput> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      out.push_back(predict(images[i]));
    } catch (const ClassifierError& e) {
      throw ClassifierError("batch element " + std::to_string(i) + ": " + e.what(),
                            e.request_id(), e.retryable());
    } catch (const std::exception& e) {
      throw ClassifierError("batch element " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

bool Classifier::has_class(const std::string& class_id) const {
  const auto& ids = classes();
  return std::find(ids.begin(), ids.end(), class_id) != ids.end();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// ---------------------------------------------------------------------------
// PatchClassifier

PatchClassifier::PatchClassifier(std::vector<ClassSpec> specs, int width, int height)
    : specs_(std::move(specs)), width_(width), height_(height) {
  if (specs_.empty()) throw ContractViolation("patch classifier: no classes");
  for (const auto& s : specs_) {
    const Box& r = s.region;
    if (r.x_min < 0 || r.y_min < 0 || r.x_min >= r.x_max || r.y_min >= r.y_max)
      throw ContractViolation("patch classifier: degenerate region for class " + s.id);
    if ((width_ > 0 && r.x_max > width_) || (height_ > 0 && r.y_max > height_))
      throw ContractViolation("patch classifier: region outside image for class " + s.id);
    if (std::find(ids_.begin(), ids_.end(), s.id) != ids_.end())
      throw ContractViolation("patch classifier: duplicate class " + s.id);
    ids_.push_back(s.id);
  }
}

double PatchClassifier::region_mean(const ImageBuffer& image, const Box& region) {
  double sum = 0.0;
  for (int y = region.y_min; y < region.y_max; ++y)
    for (int x = region.x_min; x < region.x_max; ++x)
      for (int c = 0; c < image.channels(); ++c) sum += image.at(x, y, c);
  const double n = static_cast<double>(region.x_max - region.x_min) *
                   static_cast<double>(region.y_max - region.y_min) * image.channels();
  return sum / n;
}

ClassifierOutput PatchClassifier::predict(const ImageBuffer& image) const {
  if ((width_ > 0 && image.width() != width_) || (height_ > 0 && image.height() != height_))
    throw ContractViolation("patch classifier: image dimensions do not match");
  ClassifierOutput out;
  for (const auto& s : specs_) {
    if (s.region.x_max > image.width() || s.region.y_max > image.height())
      throw ContractViolation("patch classifier: image smaller than region of " + s.id);
    out.probabilities[s.id] = sigmoid(s.a * region_mean(image, s.region) + s.b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LinearClassifier

LinearClassifier::LinearClassifier(SegmentMap segmap, std::vector<ClassSpec> specs, LinkFunction link)
    : segmap_(std::move(segmap)), specs_(std::move(specs)), link_(link) {
  if (specs_.empty()) throw ContractViolation("linear classifier: no classes");
  for (const auto& s : specs_) {
    if (s.weights.size() != static_cast<std::size_t>(segmap_.segment_count()))
      throw ContractViolation("linear classifier: class " + s.id +
                              " needs one weight per segment");
    if (std::find(ids_.begin(), ids_.end(), s.id) != ids_.end())
      throw ContractViolation("linear classifier: duplicate class " + s.id);
    ids_.push_back(s.id);
  }
}

std::vector<double> LinearClassifier::segment_contrast(const ImageBuffer& image,
                                                       const SegmentMap& segmap) {
  if (image.width() != segmap.width() || image.height() != segmap.height())
    throw ContractViolation("linear classifier: image dimensions do not match its segment map");
  const auto ch = static_cast<std::size_t>(image.channels());
  const auto data = image.data();
  std::vector<double> contrast(static_cast<std::size_t>(segmap.segment_count()), 0.0);
  for (SegmentId s = 0; s < segmap.segment_count(); ++s) {
    const auto pixels = segmap.pixels_of(s);
    double total = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      double mean = 0.0;
      for (std::size_t p : pixels) mean += data[p * ch + c];
      mean /= static_cast<double>(pixels.size());
      double dev = 0.0;
      for (std::size_t p : pixels) dev += std::abs(data[p * ch + c] - mean);
      total += dev / static_cast<double>(pixels.size());
    }
    // Twice the deviation: a 0/1 checkerboard scores exactly 1.
    contrast[static_cast<std::size_t>(s)] = 2.0 * total / static_cast<double>(ch);
  }
  return contrast;
}

ClassifierOutput LinearClassifier::predict(const ImageBuffer& image) const {
  const auto contrast = segment_contrast(image, segmap_);
  ClassifierOutput out;
  for (const auto& s : specs_) {
    double z = s.bias;
    for (std::size_t i = 0; i < contrast.size(); ++i) z += s.weights[i] * contrast[i];
    out.probabilities[s.id] =
        link_ == LinkFunction::sigmoid ? sigmoid(z) : std::clamp(z, 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ranking and thresholds

std::vector<std::string> top_k_classes(const ClassifierOutput& out, std::size_t k) {
  if (k < 1) throw ContractViolation("top_k_classes: k must be >= 1");
  std::vector<std::pair<std::string, double>> ranked(out.probabilities.begin(),
                                                     out.probabilities.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) {
    if (l.second != r.second) return l.second > r.second;
    return l.first < r.first;
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) ids.push_back(ranked[i].first);
  return ids;
}

ThresholdTable::ThresholdTable(std::map<std::string, double> values) {
  for (const auto& [k, v] : values) set(k, v);
}

void ThresholdTable::set(const std::string& class_id, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ContractViolation("threshold for " + class_id + " must lie in [0,1]");
  values_[class_id] = threshold;
}

std::optional<double> ThresholdTable::find(const std::string& class_id) const {
  auto it = values_.find(class_id);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ThresholdTable::at(const std::string& class_id) const {
  auto v = find(class_id);
  if (!v) throw ContractViolation("no threshold for class " + class_id);
  return *v;
}

nlohmann::json ThresholdTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

ThresholdTable ThresholdTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("threshold table must be a JSON object");
  ThresholdTable t;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw FormatError("threshold for " + k + " is not a number");
    t.set(k, v.get<double>());
  }
  return t;
}

void ThresholdTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot create " + path);
  out << to_json().dump(2) << '\n';
}

ThresholdTable ThresholdTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

ThresholdTable calibrate_thresholds(const Classifier& classifier,
                                    std::span<const CalibrationSample> calibration,
                                    Warnings* warnings) {
  if (calibration.empty()) throw ContractViolation("calibration set is empty");
  std::map<std::string, std::vector<double>> qualifying;
  for (const auto& id : classifier.classes()) qualifying[id];
  for (const auto& sample : calibration) {
    const auto out = classifier.predict(sample.image);
    for (const auto& label : sample.true_labels) {
      auto it = out.probabilities.find(label);
      if (it == out.probabilities.end()) continue;
      if (it->second > kDetectionCutoff) qualifying[label].push_back(it->second);
    }
  }
  ThresholdTable table;
  for (auto& [id, probs] : qualifying) {
    if (probs.empty()) {
      warn(warnings, "class " + id + ": no correctly detected calibration samples, using 0.5");
      table.set(id, kFallbackThreshold);
      continue;
    }
    // Sorted summation keeps the mean independent of sample order.
    std::sort(probs.begin(), probs.end());
    double sum = 0.0;
    for (double p : probs) sum += p;
    table.set(id, std::clamp(sum / static_cast<double>(probs.size()), 0.0, 1.0));
  }
  return table;
}

// ---------------------------------------------------------------------------
// JSON construction

namespace {

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("region must be [x_min,y_min,x_max,y_max]");
  return Box{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& cfg,
                                                 const SegmentMap* fallback_segments) {
  try {
    const std::string kind = cfg.at("kind").get<std::string>();
    if (kind == "builtin-patch") {
      std::vector<PatchClassifier::ClassSpec> specs;
      for (const auto& c : cfg.at("classes")) {
        PatchClassifier::ClassSpec s;
        s.id = c.at("id").get<std::string>();
        s.region = box_from_json(c.at("region"));
        s.a = c.value("a", 10.0);
        s.b = c.value("b", -5.0);
        specs.push_back(std::move(s));
      }
      return std::make_unique<PatchClassifier>(std::move(specs), cfg.value("width", 0),
                                               cfg.value("height", 0));
    }
    if (kind == "builtin-linear") {
      std::optional<SegmentMap> segments;
      if (cfg.contains("segment_map")) {
        segments = load_precomputed(cfg["segment_map"].get<std::string>());
      } else if (fallback_segments != nullptr) {
        segments = *fallback_segments;
      } else {
        throw FormatError("builtin-linear needs a segment_map");
      }
      std::vector<LinearClassifier::ClassSpec> specs;
      for (const auto& c : cfg.at("classes")) {
        LinearClassifier::ClassSpec s;
        s.id = c.at("id").get<std::string>();
        s.bias = c.value("bias", 0.0);
        if (c.contains("weights")) {
          s.weights = c["weights"].get<std::vector<double>>();
        } else {
          s.weights.assign(static_cast<std::size_t>(segments->segment_count()), 0.0);
        }
        specs.push_back(std::move(s));
      }
      const std::string link = cfg.value("link", std::string("sigmoid"));
      if (link != "sigmoid" && link != "identity") throw FormatError("unknown link " + link);
      return std::make_unique<LinearClassifier>(
          std::move(*segments), std::move(specs),
          link == "sigmoid" ? LinkFunction::sigmoid : LinkFunction::identity);
    }
    throw FormatError("unknown classifier kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("classifier config: ") + e.what());
  }
}

nlohmann::json patch_classifier_to_json(const PatchClassifier& c) {
  nlohmann::json j;
  j["kind"] = "builtin-patch";
  j["width"] = c.width();
  j["height"] = c.height();
  j["classes"] = nlohmann::json::array();
  for (const auto& s : c.specs())
    j["classes"].push_back({{"id", s.id},
                            {"region", {s.region.x_min, s.region.y_min, s.region.x_max, s.region.y_max}},
                            {"a", s.a},
                            {"b", s.b}});
  return j;
}

}  // namespace mindful
