#pragma once

// Shared domain types: images, segmentations, perturbation masks,
// annotations and classifier outputs.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mindful/errors.hpp"

namespace mindful {

using SegmentId = std::int32_t;

// Row-major, interleaved-channel image with intensities in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels);
  ImageBuffer(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  float at(int x, int y, int c = 0) const {
    return data_[index(x, y, c)];
  }
  float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Per-pixel superpixel labels forming a full partition with contiguous
// labels [0, segment_count).
class SegmentMap {
 public:
  SegmentMap() = default;
  // Validates the partition; throws ContractViolation on gaps, negative
  // labels or a size mismatch.
  SegmentMap(int width, int height, std::vector<SegmentId> labels);

  // Relabels to contiguous ids in order of first appearance (raster order).
  static SegmentMap from_labels_compacting(int width, int height,
                                           std::vector<SegmentId> labels,
                                           bool* had_gaps = nullptr);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return labels_.size(); }
  int segment_count() const noexcept { return segment_count_; }

  SegmentId at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  std::span<const SegmentId> labels() const noexcept { return labels_; }

  // Row-major pixel indices of one segment, ascending.
  std::span<const std::size_t> pixels_of(SegmentId s) const;
  std::size_t segment_size(SegmentId s) const { return pixels_of(s).size(); }

  bool operator==(const SegmentMap& o) const {
    return width_ == o.width_ && height_ == o.height_ && labels_ == o.labels_;
  }

 private:
  void build_index();

  int width_ = 0;
  int height_ = 0;
  int segment_count_ = 0;
  std::vector<SegmentId> labels_;
  // CSR layout: pixels of segment s are order_[offsets_[s] .. offsets_[s+1]).
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> order_;
};

// Binary on/off vector over superpixels: 1 keeps the segment, 0 replaces it
// with its mean colour.
class MaskVector {
 public:
  MaskVector() = default;
  explicit MaskVector(std::size_t size, std::uint8_t fill = 1) : bits_(size, fill) {}
  explicit MaskVector(std::vector<std::uint8_t> bits);

  static MaskVector all_ones(std::size_t size) { return MaskVector(size, 1); }

  std::size_t size() const noexcept { return bits_.size(); }
  bool active(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool on) { bits_[i] = on ? 1 : 0; }
  std::size_t zeros() const noexcept;
  std::size_t ones() const noexcept { return size() - zeros(); }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  auto operator<=>(const MaskVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Multi-label output: independent probability per class id.
struct ClassifierOutput {
  std::map<std::string, double> probabilities;

  double at(const std::string& class_id) const;
  bool operator==(const ClassifierOutput&) const = default;
};

struct Box {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;  // exclusive
  int y_max = 0;  // exclusive

  bool contains(int x, int y) const noexcept {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
  bool operator==(const Box&) const = default;
};

struct Annotation {
  std::string image_id;
  std::string class_id;
  Box box;
};

struct AnnotationSet {
  std::vector<Annotation> entries;

  std::vector<Box> boxes_for(const std::string& image_id,
                             const std::string& class_id) const;
  std::vector<std::string> classes_for(const std::string& image_id) const;
};

class BinaryPixelMask {
 public:
  BinaryPixelMask() = default;
  BinaryPixelMask(int width, int height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}
  BinaryPixelMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool get(std::size_t i) const { return bits_[i] != 0; }
  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)] != 0;
  }
  void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
  void set(int x, int y, bool on = true) {
    bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(x)] = on ? 1 : 0;
  }
  std::size_t count() const noexcept;
  bool empty_selection() const noexcept { return count() == 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  BinaryPixelMask operator|(const BinaryPixelMask& o) const;
  bool operator==(const BinaryPixelMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Replaces every deactivated segment with the per-channel mean of the
// original image over that segment. Activated segments are copied verbatim.
ImageBuffer apply_mask(const ImageBuffer& image, const SegmentMap& segmap,
                       const MaskVector& mask);

// Caches per-segment means so repeated masking of one image costs a single
// pass over the pixels of deactivated segments.
class MaskRenderer {
 public:
  MaskRenderer(const ImageBuffer& image, const SegmentMap& segmap);

  ImageBuffer render(const MaskVector& mask) const;
  const ImageBuffer& original() const noexcept { return image_; }
  const SegmentMap& segments() const noexcept { return segmap_; }
  // Per-segment, per-channel means (segment-major).
  std::span<const float> means() const noexcept { return means_; }

 private:
  ImageBuffer image_;
  SegmentMap segmap_;
  std::vector<float> means_;
};

// Union of the matching boxes, half-open in both axes. An absent
// (image, class) pair yields an all-zero mask plus a warning.
BinaryPixelMask boxes_to_pixel_mask(const AnnotationSet& ann,
                                    const std::string& image_id,
                                    const std::string& class_id, int width,
                                    int height, Warnings* warnings = nullptr);

BinaryPixelMask boxes_to_pixel_mask(std::span<const Box> boxes, int width,
                                    int height);

// Pixels of the given segments.
BinaryPixelMask segments_to_pixel_mask(const SegmentMap& segmap,
                                       std::span<const SegmentId> segments);

}  // namespace mindful
