#pragma once

#include <string>

#include "mindful/core.hpp"

namespace mindful {

// 8-bit grayscale or RGB PNG, scaled to [0,1] by 1/255. Palette images are
// expanded, alpha is dropped and 16-bit samples are reduced to 8 bits.
ImageBuffer load_png(const std::string& path);

// Rounds intensities to the nearest 8-bit level.
void save_png(const std::string& path, const ImageBuffer& image);

// CSV with header image_id,class_name,x_min,y_min,x_max,y_max. Fractional
// coordinates are widened to the enclosing integer box.
AnnotationSet load_annotations(const std::string& path);
void save_annotations(const std::string& path, const AnnotationSet& ann);

}  // namespace mindful
