#pragma once

#include <string>

#include "mindful/core.hpp"

namespace mindful {

enum class SegmenterAlgorithm { slic, felzenszwalb, precomputed };

std::string to_string(SegmenterAlgorithm a);
SegmenterAlgorithm parse_segmenter(const std::string& name);

struct SlicParams {
  int n_segments = 50;
  double compactness = 80.0;
  double sigma = 20.0;
  int iterations = 10;
};

struct FelzenszwalbParams {
  double scale = 600.0;
  int min_size = 200;
  double sigma = 0.2;
};

struct SegmenterConfig {
  SegmenterAlgorithm algorithm = SegmenterAlgorithm::slic;
  SlicParams slic;
  FelzenszwalbParams felzenszwalb;
  std::string precomputed_path;

  void validate() const;
};

// Separable Gaussian blur, kernel radius ceil(4 sigma), clamp-to-edge
// borders. sigma == 0 returns the input unchanged.
ImageBuffer gaussian_blur(const ImageBuffer& image, double sigma);

// k-means in (colour, x, y) space from a regular grid of seeds, followed by
// a connectivity pass that merges disconnected fragments into their largest
// adjacent segment. Colour distances are measured on a 0..100 scale.
SegmentMap segment_slic(const ImageBuffer& image, const SlicParams& params);

// Graph-based merging over the 8-connected pixel grid with threshold
// scale / |C| and a final pass that absorbs components below min_size.
// Edge weights are colour distances on a 0..255 scale.
SegmentMap segment_felzenszwalb(const ImageBuffer& image, const FelzenszwalbParams& params);

SegmentMap segment(const ImageBuffer& image, const SegmenterConfig& cfg,
                   Warnings* warnings = nullptr);

// Text format: "width height" then height rows of width labels.
// Label gaps are closed (with a warning); negative labels are rejected.
SegmentMap load_precomputed(const std::string& path, Warnings* warnings = nullptr);
SegmentMap parse_precomputed(const std::string& text, Warnings* warnings = nullptr);
void save_precomputed(const std::string& path, const SegmentMap& segmap);

// Relabels in raster order of first occurrence. Every segmenter ends with it
// so labels are canonical.
SegmentMap canonicalize_labels(int width, int height, std::span<const SegmentId> labels);

// True when every label's pixels form one 4-connected region.
bool segments_connected(const SegmentMap& segmap);

}  // namespace mindful
