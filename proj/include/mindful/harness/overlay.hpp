#pragma once

#include <span>
#include <vector>

#include "mindful/core.hpp"

namespace mindful::harness {

// RGB copy of the image with yellow outlines around the selected
// superpixels, red boxes around each connected explanation component and,
// when given, cyan ground-truth boxes.
ImageBuffer render_overlay(const ImageBuffer& image, const SegmentMap& segmap,
                           std::span<const SegmentId> selected, std::span<const Box> gt_boxes = {});

}  // namespace mindful::harness
