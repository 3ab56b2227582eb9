#pragma once

// Small fixtures shared by the unit suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mindful/classifier.hpp"
#include "mindful/core.hpp"

namespace mindful::testing {

inline ImageBuffer gray(int w, int h, std::vector<float> values) {
  return ImageBuffer(w, h, 1, std::move(values));
}

inline ImageBuffer constant_image(int w, int h, float v, int channels = 1) {
  return ImageBuffer(w, h, channels,
                     std::vector<float>(static_cast<std::size_t>(w * h * channels), v));
}

inline ImageBuffer random_image(int w, int h, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(static_cast<std::size_t>(w * h * channels));
  for (auto& x : v) x = u(rng);
  return ImageBuffer(w, h, channels, std::move(v));
}

// Rectangular grid of cells of cell_w x cell_h pixels, labelled row-major.
inline SegmentMap grid_segments(int cols, int rows, int cell_w, int cell_h) {
  const int w = cols * cell_w;
  const int h = rows * cell_h;
  std::vector<SegmentId> labels(static_cast<std::size_t>(w * h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      labels[static_cast<std::size_t>(y * w + x)] = (y / cell_h) * cols + (x / cell_w);
  return SegmentMap(w, h, std::move(labels));
}

// Returns a fixed probability for one class regardless of the image.
class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(std::vector<std::pair<std::string, double>> probs) {
    for (auto& [k, v] : probs) {
      ids_.push_back(k);
      out_.probabilities[k] = v;
    }
  }
  const std::vector<std::string>& classes() const override { return ids_; }
  ClassifierOutput predict(const ImageBuffer&) const override {
    ++calls;
    return out_;
  }
  std::string kind() const override { return "constant"; }
  mutable int calls = 0;

 private:
  std::vector<std::string> ids_;
  ClassifierOutput out_;
};

}  // namespace mindful::testing
