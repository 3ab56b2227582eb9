#include "mindful/surrogate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mindful {

void SurrogateConfig::validate() const {
  if (!(kernel_width > 0)) throw ContractViolation("surrogate: kernel_width must be > 0");
  if (!(ridge_lambda >= 0)) throw ContractViolation("surrogate: ridge_lambda must be >= 0");
}

double proximity_weight(const MaskVector& mask, const SurrogateConfig& cfg) {
  if (mask.size() == 0) throw ContractViolation("proximity_weight: empty mask");
  const double ones = static_cast<double>(mask.ones());
  const double distance =
      ones == 0 ? 1.0 : 1.0 - std::sqrt(ones / static_cast<double>(mask.size()));
  return std::exp(-(distance * distance) / (cfg.kernel_width * cfg.kernel_width));
}

SurrogateFit fit_weighted(std::span<const MaskVector> masks, std::span<const double> responses,
                          std::span<const double> weights, double ridge_lambda) {
  if (masks.size() != responses.size() || masks.size() != weights.size())
    throw ContractViolation("fit: masks, responses and weights differ in length");
  if (masks.size() < 2) throw ContractViolation("fit: at least two samples are required");
  if (!(ridge_lambda >= 0)) throw ContractViolation("fit: ridge_lambda must be >= 0");
  const std::size_t s = masks.front().size();
  for (const auto& m : masks)
    if (m.size() != s) throw ContractViolation("fit: masks differ in length");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) throw ContractViolation("fit: weights must be finite and >= 0");

  // Unknowns: [intercept, beta_0 .. beta_{s-1}].
  const auto n = static_cast<Eigen::Index>(s + 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> active;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const double w = weights[i];
    if (w == 0) continue;
    const double y = responses[i];
    active.clear();
    active.push_back(0);
    for (std::size_t j = 0; j < s; ++j)
      if (masks[i].active(j)) active.push_back(static_cast<Eigen::Index>(j + 1));
    for (Eigen::Index a : active) {
      rhs(a) += w * y;
      for (Eigen::Index b : active) gram(a, b) += w;
    }
  }
  for (Eigen::Index j = 1; j < n; ++j) gram(j, j) += ridge_lambda;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const auto& d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0) ||
      d.cwiseAbs().minCoeff() <= 1e-12 * dmax) {
    throw ContractViolation(ridge_lambda == 0
                                ? "fit: singular system; use ridge_lambda > 0"
                                : "fit: singular system (all sample weights zero?)");
  }
  const Eigen::VectorXd solution = ldlt.solve(rhs);
  SurrogateFit out;
  out.intercept = solution(0);
  out.coefficients.resize(s);
  for (std::size_t j = 0; j < s; ++j) out.coefficients[j] = solution(static_cast<Eigen::Index>(j + 1));
  return out;
}

SurrogateFit fit(std::span<const MaskVector> masks, std::span<const double> responses,
                 const SurrogateConfig& cfg, std::span<const double> multipliers) {
  cfg.validate();
  if (!multipliers.empty() && multipliers.size() != masks.size())
    throw ContractViolation("fit: multipliers differ in length from masks");
  if (masks.empty()) throw ContractViolation("fit: at least two samples are required");
  std::vector<double> weights(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    weights[i] = proximity_weight(masks[i], cfg) * (multipliers.empty() ? 1.0 : multipliers[i]);
  for (double y : responses)
    if (!(y >= 0.0 && y <= 1.0)) throw ContractViolation("fit: responses must lie in [0,1]");
  return fit_weighted(masks, responses, weights, cfg.ridge_lambda);
}

std::vector<SegmentId> rank_superpixels(std::span<const double> coefficients) {
  std::vector<SegmentId> ids(coefficients.size());
  std::iota(ids.begin(), ids.end(), SegmentId{0});
  std::stable_sort(ids.begin(), ids.end(), [&](SegmentId a, SegmentId b) {
    return coefficients[static_cast<std::size_t>(a)] > coefficients[static_cast<std::size_t>(b)];
  });
  return ids;
}

void select_top_k(ExplanationResult& result, const SegmentMap& segmap, std::size_t top_k) {
  if (top_k < 1) throw ContractViolation("explain: top_k must be >= 1");
  result.selected_top_k.clear();
  for (SegmentId id : result.ranked_superpixels) {
    if (result.selected_top_k.size() >= top_k) break;
    if (result.coefficients[static_cast<std::size_t>(id)] > 0) result.selected_top_k.push_back(id);
  }
  if (result.selected_top_k.empty() && !result.coefficients.empty())
    warn(&result.warnings, "no positive coefficients; explanation is empty");
  result.explanation_pixel_mask = segments_to_pixel_mask(segmap, result.selected_top_k);
}

ExplanationResult explain(std::span<const MaskVector> masks,
                          std::optional<std::span<const double>> cached_responses,
                          const MaskRenderer& renderer, const std::string& class_id,
                          const Classifier& classifier, std::size_t top_k,
                          const SurrogateConfig& cfg, std::span<const double> multipliers) {
  if (top_k < 1) throw ContractViolation("explain: top_k must be >= 1");
  cfg.validate();
  const SegmentMap& segmap = renderer.segments();
  const auto s = static_cast<std::size_t>(segmap.segment_count());
  ExplanationResult result;
  result.class_id = class_id;
  result.segment_count = s;
  result.sample_count_used = masks.size();
  result.explanation_pixel_mask = BinaryPixelMask(segmap.width(), segmap.height());

  if (masks.size() < 2) {
    result.coefficients.assign(s, 0.0);
    result.ranked_superpixels = rank_superpixels(result.coefficients);
    warn(&result.warnings, "fewer than two samples; surrogate not fitted");
    return result;
  }

  std::vector<double> responses;
  if (cached_responses) {
    if (cached_responses->size() != masks.size())
      throw ContractViolation("explain: cached responses differ in length from masks");
    responses.assign(cached_responses->begin(), cached_responses->end());
  } else {
    if (!classifier.has_class(class_id))
      throw ContractViolation("explain: unknown class '" + class_id + "'");
    responses.reserve(masks.size());
    for (const auto& m : masks) responses.push_back(classifier.predict(renderer.render(m)).at(class_id));
  }

  const SurrogateFit f = fit(masks, responses, cfg, multipliers);
  result.coefficients = f.coefficients;
  result.intercept = f.intercept;
  result.ranked_superpixels = rank_superpixels(result.coefficients);
  for (auto it = result.ranked_superpixels.rbegin(); it != result.ranked_superpixels.rend(); ++it)
    if (result.coefficients[static_cast<std::size_t>(*it)] < 0) result.negative_superpixels.push_back(*it);
  select_top_k(result, segmap, top_k);
  return result;
}

}  // namespace mindful
