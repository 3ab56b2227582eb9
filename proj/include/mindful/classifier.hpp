#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mindful/core.hpp"

namespace mindful {

// The black-box model. Implementations must be safe to call concurrently
// from several threads when deterministic() is true.
class Classifier {
 public:
  virtual ~Classifier() = default;

  // Ordered class ids reported by predict().
  virtual const std::vector<std::string>& classes() const = 0;
  virtual ClassifierOutput predict(const ImageBuffer& image) const = 0;

  // Element-wise predict in order. A failure is rethrown as ClassifierError
  // naming the failing index.
  virtual std::vector<ClassifierOutput> predict_batch(std::span<const ImageBuffer> images) const;

  // Identical inputs give bit-identical outputs.
  virtual bool deterministic() const { return true; }
  virtual std::string kind() const = 0;

  bool has_class(const std::string& class_id) const;
};

double sigmoid(double z);

// sigmoid(a * mean(region) + b) per class, where mean(region) averages all
// channels over the half-open rectangle.
class PatchClassifier final : public Classifier {
 public:
  struct ClassSpec {
    std::string id;
    Box region;
    double a = 10.0;
    double b = -5.0;
  };

  // width/height of 0 accept any image large enough for every region.
  PatchClassifier(std::vector<ClassSpec> specs, int width = 0, int height = 0);

  const std::vector<std::string>& classes() const override { return ids_; }
  ClassifierOutput predict(const ImageBuffer& image) const override;
  std::string kind() const override { return "builtin-patch"; }

  const std::vector<ClassSpec>& specs() const noexcept { return specs_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  static double region_mean(const ImageBuffer& image, const Box& region);

 private:
  std::vector<ClassSpec> specs_;
  std::vector<std::string> ids_;
  int width_;
  int height_;
};

enum class LinkFunction { sigmoid, identity };

// link(bias + sum_s weight_s * contrast_s) per class over a fixed segment
// map, where contrast_s is twice the mean absolute deviation of the image
// inside segment s from that segment's mean (channel-averaged), so it lies
// in [0,1]. A mean-filled segment has contrast 0, so the response is
// exactly linear in the mask bits for the identity link. The identity link clamps to [0,1].
class LinearClassifier final : public Classifier {
 public:
  struct ClassSpec {
    std::string id;
    std::vector<double> weights;  // one per segment
    double bias = 0.0;
  };

  LinearClassifier(SegmentMap segmap, std::vector<ClassSpec> specs,
                   LinkFunction link = LinkFunction::sigmoid);

  const std::vector<std::string>& classes() const override { return ids_; }
  ClassifierOutput predict(const ImageBuffer& image) const override;
  std::string kind() const override { return "builtin-linear"; }

  const SegmentMap& segments() const noexcept { return segmap_; }
  const std::vector<ClassSpec>& specs() const noexcept { return specs_; }
  LinkFunction link() const noexcept { return link_; }

  static std::vector<double> segment_contrast(const ImageBuffer& image, const SegmentMap& segmap);

 private:
  SegmentMap segmap_;
  std::vector<ClassSpec> specs_;
  std::vector<std::string> ids_;
  LinkFunction link_;
};

// Class ids by descending probability, ties by ascending id. k larger than
// the class count returns every class.
std::vector<std::string> top_k_classes(const ClassifierOutput& out, std::size_t k);

class ThresholdTable {
 public:
  ThresholdTable() = default;
  explicit ThresholdTable(std::map<std::string, double> values);

  void set(const std::string& class_id, double threshold);
  std::optional<double> find(const std::string& class_id) const;
  double at(const std::string& class_id) const;
  const std::map<std::string, double>& values() const noexcept { return values_; }

  nlohmann::json to_json() const;
  static ThresholdTable from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static ThresholdTable load(const std::string& path);

  bool operator==(const ThresholdTable&) const = default;

 private:
  std::map<std::string, double> values_;
};

struct CalibrationSample {
  ImageBuffer image;
  std::vector<std::string> true_labels;
};

// Decision rule for "correctly detected" in calibration.
inline constexpr double kDetectionCutoff = 0.5;
inline constexpr double kFallbackThreshold = 0.5;

// Per class: mean predicted probability over samples where the class is a
// true label and its probability exceeds 0.5. Classes without such samples
// fall back to 0.5 with a warning.
ThresholdTable calibrate_thresholds(const Classifier& classifier,
                                    std::span<const CalibrationSample> calibration,
                                    Warnings* warnings = nullptr);

// Builtin construction from JSON; see FORMATS.md. The linear classifier
// takes its segment map from the "segment_map" path key or, failing that,
// from `fallback_segments`.
std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& cfg,
                                                 const SegmentMap* fallback_segments = nullptr);
nlohmann::json patch_classifier_to_json(const PatchClassifier& c);

}  // namespace mindful
