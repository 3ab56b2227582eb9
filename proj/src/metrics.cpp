#include "mindful/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mindful {

PixelDistribution::PixelDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0) || !std::isfinite(v)) throw ContractViolation("distribution entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractViolation("distribution must sum to 1");
}

namespace {

void require_same_shape(const BinaryPixelMask& a, const BinaryPixelMask& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw ContractViolation("masks differ in dimensions");
}

}  // namespace

double iou(const BinaryPixelMask& gt, const BinaryPixelMask& ex, Warnings* warnings) {
  require_same_shape(gt, ex);
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto g = gt.bits();
  const auto e = ex.bits();
  for (std::size_t i = 0; i < g.size(); ++i) {
    inter += static_cast<std::size_t>(g[i] & e[i]);
    uni += static_cast<std::size_t>(g[i] | e[i]);
  }
  if (uni == 0) {
    warn(warnings, "iou: both masks are empty");
    return 1.0;
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PixelDistribution to_distribution(const BinaryPixelMask& mask) {
  const std::size_t n = mask.count();
  if (n == 0) throw ContractViolation("to_distribution: mask has no set bits");
  std::vector<double> p(mask.size(), 0.0);
  const double v = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (mask.get(i)) p[i] = v;
  return PixelDistribution(std::move(p));
}

double kl_div(std::span<const double> ex, std::span<const double> gt, double epsilon) {
  if (ex.size() != gt.size()) throw ContractViolation("kl_div: length mismatch");
  if (!(epsilon > 0)) throw ContractViolation("kl_div: epsilon must be > 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (ex[i] == 0) continue;
    sum += ex[i] * std::log2((ex[i] + epsilon) / (gt[i] + epsilon));
  }
  return sum;
}

double kl_div(const PixelDistribution& ex, const PixelDistribution& gt, double epsilon) {
  return kl_div(ex.probabilities(), gt.probabilities(), epsilon);
}

double js_div(std::span<const double> ex, std::span<const double> gt) {
  if (ex.size() != gt.size()) throw ContractViolation("js_div: length mismatch");
  // Accumulated per index as 0.5 * (term_ex + term_gt); the sum of the two
  // terms is commutative, so swapping the arguments is bit-identical.
  double total = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const double m = 0.5 * (ex[i] + gt[i]);
    if (m == 0) continue;
    const double a = ex[i] > 0 ? ex[i] * std::log2(ex[i] / m) : 0.0;
    const double b = gt[i] > 0 ? gt[i] * std::log2(gt[i] / m) : 0.0;
    total += a + b;
  }
  // Rounding can leave a residue just outside the mathematical range.
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double js_div(const PixelDistribution& ex, const PixelDistribution& gt) {
  return js_div(ex.probabilities(), gt.probabilities());
}

double localization_precision(const BinaryPixelMask& gt, const BinaryPixelMask& ex,
                              Warnings* warnings) {
  require_same_shape(gt, ex);
  if (gt.count() == 0) throw ContractViolation("localization_precision: ground truth is empty");
  if (ex.count() == 0) {
    warn(warnings, "localization_precision: empty explanation scored 0");
    return 0.0;
  }
  return 1.0 - js_div(to_distribution(ex), to_distribution(gt));
}

StabilityReport stability_score(std::span<const BinaryPixelMask> runs) {
  if (runs.size() < 2) throw ContractViolation("stability_score: at least two runs are required");
  StabilityReport report;
  report.runs = runs.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const double v = iou(runs[i], runs[j]);
      report.pairwise_iou.push_back(v);
      sum += v;
    }
  report.stability = sum / static_cast<double>(report.pairwise_iou.size());
  return report;
}

double mean_gt_iou(std::span<const BinaryPixelMask> runs, const BinaryPixelMask& gt) {
  if (runs.empty()) throw ContractViolation("mean_gt_iou: no runs");
  double sum = 0.0;
  for (const auto& r : runs) sum += iou(gt, r);
  return sum / static_cast<double>(runs.size());
}

std::vector<Box> component_boxes(const BinaryPixelMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Box> boxes;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      const auto p0 = static_cast<std::size_t>(y0) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x0);
      if (!mask.get(p0) || seen[p0] != 0) continue;
      Box b{x0, y0, x0 + 1, y0 + 1};
      seen[p0] = 1;
      stack.emplace_back(x0, y0);
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        b.x_min = std::min(b.x_min, x);
        b.y_min = std::min(b.y_min, y);
        b.x_max = std::max(b.x_max, x + 1);
        b.y_max = std::max(b.y_max, y + 1);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const auto q = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
            if (!mask.get(q) || seen[q] != 0) continue;
            seen[q] = 1;
            stack.emplace_back(nx, ny);
          }
      }
      boxes.push_back(b);
    }
  return boxes;
}

BinaryPixelMask to_bbox_mask(const BinaryPixelMask& mask) {
  const auto boxes = component_boxes(mask);
  return boxes_to_pixel_mask(boxes, mask.width(), mask.height());
}

}  // namespace mindful
