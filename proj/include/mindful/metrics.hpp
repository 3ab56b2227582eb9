#pragma once

// Overlap, divergence and stability scores over binary pixel masks. All
// logarithms are base 2, so Jensen-Shannon divergence lies in [0,1].

#include <span>
#include <vector>

#include "mindful/core.hpp"

namespace mindful {

inline constexpr double kDefaultEpsilon = 1e-12;

class PixelDistribution {
 public:
  // Throws ContractViolation unless entries are >= 0 and sum to 1 (1e-9).
  explicit PixelDistribution(std::vector<double> probabilities);

  std::span<const double> probabilities() const noexcept { return p_; }
  std::size_t size() const noexcept { return p_.size(); }

 private:
  std::vector<double> p_;
};

// |GT and EX| / |GT or EX|; 1 when both masks are empty (with a warning).
double iou(const BinaryPixelMask& gt, const BinaryPixelMask& ex, Warnings* warnings = nullptr);

// Uniform distribution over the set bits. Throws on an empty mask.
PixelDistribution to_distribution(const BinaryPixelMask& mask);

// sum_i ex_i * log2((ex_i + eps) / (gt_i + eps))
double kl_div(const PixelDistribution& ex, const PixelDistribution& gt,
              double epsilon = kDefaultEpsilon);
double kl_div(std::span<const double> ex, std::span<const double> gt,
              double epsilon = kDefaultEpsilon);

// (KL(ex, M) + KL(gt, M)) / 2 with M the average distribution. Terms with
// zero mass contribute nothing, so identical inputs give exactly 0.
double js_div(const PixelDistribution& ex, const PixelDistribution& gt);
double js_div(std::span<const double> ex, std::span<const double> gt);

// 1 - js_div(to_distribution(ex), to_distribution(gt)). An empty
// explanation scores 0 with a warning; an empty ground truth throws.
double localization_precision(const BinaryPixelMask& gt, const BinaryPixelMask& ex,
                              Warnings* warnings = nullptr);

struct StabilityReport {
  std::vector<double> pairwise_iou;  // over unordered run pairs (i < j)
  double stability = 0.0;            // mean of pairwise_iou
  std::size_t runs = 0;
};

StabilityReport stability_score(std::span<const BinaryPixelMask> runs);

// Mean IOU of each run against the ground truth.
double mean_gt_iou(std::span<const BinaryPixelMask> runs, const BinaryPixelMask& gt);

// Tight bounding box around each 8-connected component, rendered as their
// union.
std::vector<Box> component_boxes(const BinaryPixelMask& mask);
BinaryPixelMask to_bbox_mask(const BinaryPixelMask& mask);

}  // namespace mindful
