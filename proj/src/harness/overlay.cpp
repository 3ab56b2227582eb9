#include "mindful/harness/overlay.hpp"

#include "mindful/metrics.hpp"

namespace mindful::harness {

namespace {

void paint(ImageBuffer& img, int x, int y, float r, float g, float b) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  img.at(x, y, 0) = r;
  img.at(x, y, 1) = g;
  img.at(x, y, 2) = b;
}

void outline(ImageBuffer& img, const Box& box, float r, float g, float b) {
  for (int x = box.x_min; x < box.x_max; ++x) {
    paint(img, x, box.y_min, r, g, b);
    paint(img, x, box.y_max - 1, r, g, b);
  }
  for (int y = box.y_min; y < box.y_max; ++y) {
    paint(img, box.x_min, y, r, g, b);
    paint(img, box.x_max - 1, y, r, g, b);
  }
}

}  // namespace

ImageBuffer render_overlay(const ImageBuffer& image, const SegmentMap& segmap,
                           std::span<const SegmentId> selected, std::span<const Box> gt_boxes) {
  if (image.width() != segmap.width() || image.height() != segmap.height())
    throw ContractViolation("overlay: image and segment map differ in size");
  const int w = image.width();
  const int h = image.height();
  ImageBuffer out(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(x, y, image.channels() == 3 ? c : 0);

  const BinaryPixelMask mask = segments_to_pixel_mask(segmap, selected);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y)) continue;
      const SegmentId s = segmap.at(x, y);
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 || segmap.at(x - 1, y) != s ||
                        segmap.at(x + 1, y) != s || segmap.at(x, y - 1) != s || segmap.at(x, y + 1) != s;
      if (edge) paint(out, x, y, 1.0f, 1.0f, 0.0f);
    }
  for (const Box& b : component_boxes(mask)) outline(out, b, 1.0f, 0.0f, 0.0f);
  for (const Box& b : gt_boxes) outline(out, b, 0.0f, 1.0f, 1.0f);
  return out;
}

}  // namespace mindful::harness
