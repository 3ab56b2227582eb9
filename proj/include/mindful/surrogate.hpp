#pragma once

// Weighted ridge surrogate fitted over perturbation samples, and the ranked
// superpixel explanation extracted from its coefficients.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mindful/classifier.hpp"

namespace mindful {

struct SurrogateConfig {
  double kernel_width = 0.25;
  double ridge_lambda = 1.0;

  void validate() const;
};

// exp(-d^2 / kernel_width^2) where d is the cosine distance between the mask
// and the all-ones mask; an all-zero mask is at distance 1.
double proximity_weight(const MaskVector& mask, const SurrogateConfig& cfg);

struct SurrogateFit {
  std::vector<double> coefficients;
  double intercept = 0.0;
};

// Minimizes sum_i w_i (y_i - b0 - beta . m_i)^2 + lambda |beta|^2 with
// w_i = proximity_weight(m_i) * multiplier_i (multipliers default to 1).
// The intercept is not penalized. Normal equations are solved with a
// pivoted LDL^T factorization.
SurrogateFit fit(std::span<const MaskVector> masks, std::span<const double> responses,
                 const SurrogateConfig& cfg, std::span<const double> multipliers = {});

// Same problem with caller-provided sample weights in place of the kernel.
SurrogateFit fit_weighted(std::span<const MaskVector> masks, std::span<const double> responses,
                          std::span<const double> weights, double ridge_lambda);

struct ExplanationResult {
  std::string class_id;
  std::string method;
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::vector<SegmentId> ranked_superpixels;  // descending coefficient
  std::vector<SegmentId> selected_top_k;      // positive coefficients only
  std::vector<SegmentId> negative_superpixels;  // metadata: coefficient < 0
  BinaryPixelMask explanation_pixel_mask;
  std::size_t sample_count_used = 0;
  std::size_t segment_count = 0;
  double runtime_seconds = 0.0;  // not persisted
  Warnings warnings;
};

// Ids sorted by descending coefficient, ties by ascending id.
std::vector<SegmentId> rank_superpixels(std::span<const double> coefficients);

// Re-derives the selection for another top_k from an existing fit.
void select_top_k(ExplanationResult& result, const SegmentMap& segmap, std::size_t top_k);

// Evaluates responses (unless `cached_responses` supplies them), fits, ranks
// and selects up to top_k positive superpixels. With fewer than two samples
// the result is empty and carries a warning.
ExplanationResult explain(std::span<const MaskVector> masks,
                          std::optional<std::span<const double>> cached_responses,
                          const MaskRenderer& renderer, const std::string& class_id,
                          const Classifier& classifier, std::size_t top_k,
                          const SurrogateConfig& cfg,
                          std::span<const double> multipliers = {});

}  // namespace mindful
