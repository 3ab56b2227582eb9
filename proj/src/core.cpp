#include "mindful/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mindful {

// ---------------------------------------------------------------------------
// ImageBuffer

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : ImageBuffer(width, height, channels,
                  std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                         static_cast<std::size_t>(std::max(height, 0)) *
                                         static_cast<std::size_t>(std::max(channels, 0)),
                                     0.0f)) {}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 0 || height < 0) throw ContractViolation("image: negative dimensions");
  if (channels != 1 && channels != 3)
    throw ContractViolation("image: channels must be 1 or 3");
  const std::size_t expected = static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(channels);
  if (data_.size() != expected) throw ContractViolation("image: data length mismatch");
  for (float v : data_) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw ContractViolation("image: intensities must be finite and in [0,1]");
  }
}

// ---------------------------------------------------------------------------
// SegmentMap

SegmentMap::SegmentMap(int width, int height, std::vector<SegmentId> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width <= 0 || height <= 0) throw ContractViolation("segment map: empty dimensions");
  if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ContractViolation("segment map: label count does not match dimensions");
  SegmentId max_label = -1;
  for (SegmentId l : labels_) {
    if (l < 0) throw ContractViolation("segment map: negative label");
    max_label = std::max(max_label, l);
  }
  segment_count_ = max_label + 1;
  build_index();
  for (int s = 0; s < segment_count_; ++s) {
    if (offsets_[s] == offsets_[s + 1]) {
      std::ostringstream msg;
      msg << "segment map: label " << s << " is unused (labels must be contiguous)";
      throw ContractViolation(msg.str());
    }
  }
}

SegmentMap SegmentMap::from_labels_compacting(int width, int height,
                                              std::vector<SegmentId> labels,
                                              bool* had_gaps) {
  std::map<SegmentId, SegmentId> remap;
  for (SegmentId l : labels) {
    if (l < 0) throw ContractViolation("segment map: negative label");
    remap.emplace(l, 0);
  }
  // Preserve the relative order of the original ids.
  SegmentId next = 0;
  bool gaps = false;
  for (auto& [from, to] : remap) {
    if (from != next) gaps = true;
    to = next++;
  }
  for (SegmentId& l : labels) l = remap[l];
  if (had_gaps != nullptr) *had_gaps = gaps;
  return SegmentMap(width, height, std::move(labels));
}

void SegmentMap::build_index() {
  offsets_.assign(static_cast<std::size_t>(segment_count_) + 1, 0);
  for (SegmentId l : labels_) ++offsets_[static_cast<std::size_t>(l) + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  order_.resize(labels_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    order_[cursor[static_cast<std::size_t>(labels_[i])]++] = i;
}

std::span<const std::size_t> SegmentMap::pixels_of(SegmentId s) const {
  if (s < 0 || s >= segment_count_) throw ContractViolation("segment id out of range");
  const auto begin = offsets_[static_cast<std::size_t>(s)];
  const auto end = offsets_[static_cast<std::size_t>(s) + 1];
  return std::span<const std::size_t>(order_).subspan(begin, end - begin);
}

// ---------------------------------------------------------------------------
// MaskVector

MaskVector::MaskVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw ContractViolation("mask entries must be 0 or 1");
}

std::size_t MaskVector::zeros() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 0));
}

// ---------------------------------------------------------------------------
// ClassifierOutput / annotations

double ClassifierOutput::at(const std::string& class_id) const {
  auto it = probabilities.find(class_id);
  if (it == probabilities.end())
    throw ContractViolation("class '" + class_id + "' not present in classifier output");
  return it->second;
}

std::vector<Box> AnnotationSet::boxes_for(const std::string& image_id,
                                          const std::string& class_id) const {
  std::vector<Box> out;
  for (const auto& e : entries)
    if (e.image_id == image_id && e.class_id == class_id) out.push_back(e.box);
  return out;
}

std::vector<std::string> AnnotationSet::classes_for(const std::string& image_id) const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.image_id == image_id &&
        std::find(out.begin(), out.end(), e.class_id) == out.end())
      out.push_back(e.class_id);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// BinaryPixelMask

BinaryPixelMask::BinaryPixelMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ContractViolation("pixel mask: bit count does not match dimensions");
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t BinaryPixelMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

BinaryPixelMask BinaryPixelMask::operator|(const BinaryPixelMask& o) const {
  if (width_ != o.width_ || height_ != o.height_)
    throw ContractViolation("pixel mask: dimension mismatch");
  BinaryPixelMask out(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | o.bits_[i];
  return out;
}

// ---------------------------------------------------------------------------
// Masking

namespace {

void check_mask_inputs(const ImageBuffer& image, const SegmentMap& segmap) {
  if (image.width() != segmap.width() || image.height() != segmap.height())
    throw ContractViolation("apply_mask: image and segment map dimensions differ");
}

}  // namespace

MaskRenderer::MaskRenderer(const ImageBuffer& image, const SegmentMap& segmap)
    : image_(image), segmap_(segmap) {
  check_mask_inputs(image, segmap);
  const int channels = image.channels();
  means_.assign(static_cast<std::size_t>(segmap.segment_count()) *
                    static_cast<std::size_t>(channels),
                0.0f);
  const auto data = image.data();
  for (SegmentId s = 0; s < segmap.segment_count(); ++s) {
    const auto pixels = segmap.pixels_of(s);
    for (int c = 0; c < channels; ++c) {
      double sum = 0.0;
      for (std::size_t p : pixels) sum += data[p * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
      means_[static_cast<std::size_t>(s) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)] =
          static_cast<float>(sum / static_cast<double>(pixels.size()));
    }
  }
}

ImageBuffer MaskRenderer::render(const MaskVector& mask) const {
  if (mask.size() != static_cast<std::size_t>(segmap_.segment_count()))
    throw ContractViolation("apply_mask: mask length does not match segment count");
  ImageBuffer out = image_;
  auto data = out.data();
  const auto channels = static_cast<std::size_t>(image_.channels());
  for (SegmentId s = 0; s < segmap_.segment_count(); ++s) {
    if (mask.active(static_cast<std::size_t>(s))) continue;
    const float* mean = means_.data() + static_cast<std::size_t>(s) * channels;
    for (std::size_t p : segmap_.pixels_of(s))
      for (std::size_t c = 0; c < channels; ++c) data[p * channels + c] = mean[c];
  }
  return out;
}

ImageBuffer apply_mask(const ImageBuffer& image, const SegmentMap& segmap,
                       const MaskVector& mask) {
  check_mask_inputs(image, segmap);
  if (mask.size() != static_cast<std::size_t>(segmap.segment_count()))
    throw ContractViolation("apply_mask: mask length does not match segment count");
  return MaskRenderer(image, segmap).render(mask);
}

// ---------------------------------------------------------------------------
// Pixel masks

BinaryPixelMask boxes_to_pixel_mask(std::span<const Box> boxes, int width, int height) {
  BinaryPixelMask out(width, height);
  for (const Box& b : boxes) {
    if (b.x_min < 0 || b.y_min < 0 || b.x_min >= b.x_max || b.y_min >= b.y_max ||
        b.x_max > width || b.y_max > height)
      throw ContractViolation("box outside image bounds or degenerate");
    for (int y = b.y_min; y < b.y_max; ++y)
      for (int x = b.x_min; x < b.x_max; ++x) out.set(x, y);
  }
  return out;
}

BinaryPixelMask boxes_to_pixel_mask(const AnnotationSet& ann, const std::string& image_id,
                                    const std::string& class_id, int width, int height,
                                    Warnings* warnings) {
  const auto boxes = ann.boxes_for(image_id, class_id);
  if (boxes.empty())
    warn(warnings, "no annotation for image '" + image_id + "' class '" + class_id + "'");
  return boxes_to_pixel_mask(boxes, width, height);
}

BinaryPixelMask segments_to_pixel_mask(const SegmentMap& segmap,
                                       std::span<const SegmentId> segments) {
  BinaryPixelMask out(segmap.width(), segmap.height());
  for (SegmentId s : segments)
    for (std::size_t p : segmap.pixels_of(s)) out.set(p);
  return out;
}

}  // namespace mindful
