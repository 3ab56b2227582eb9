#include "mindful/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace mindful {

std::string to_string(SegmenterAlgorithm a) {
  switch (a) {
    case SegmenterAlgorithm::slic: return "slic";
    case SegmenterAlgorithm::felzenszwalb: return "felzenszwalb";
    case SegmenterAlgorithm::precomputed: return "precomputed";
  }
  return "unknown";
}

SegmenterAlgorithm parse_segmenter(const std::string& name) {
  if (name == "slic") return SegmenterAlgorithm::slic;
  if (name == "felzenszwalb") return SegmenterAlgorithm::felzenszwalb;
  if (name == "precomputed") return SegmenterAlgorithm::precomputed;
  throw ContractViolation("unknown segmenter '" + name + "'");
}

void SegmenterConfig::validate() const {
  if (slic.n_segments < 1) throw ContractViolation("slic: n_segments must be >= 1");
  if (!(slic.compactness > 0)) throw ContractViolation("slic: compactness must be > 0");
  if (!(slic.sigma >= 0)) throw ContractViolation("slic: sigma must be >= 0");
  if (slic.iterations < 1) throw ContractViolation("slic: iterations must be >= 1");
  if (!(felzenszwalb.scale > 0)) throw ContractViolation("felzenszwalb: scale must be > 0");
  if (felzenszwalb.min_size < 1) throw ContractViolation("felzenszwalb: min_size must be >= 1");
  if (!(felzenszwalb.sigma >= 0)) throw ContractViolation("felzenszwalb: sigma must be >= 0");
  if (algorithm == SegmenterAlgorithm::precomputed && precomputed_path.empty())
    throw ContractViolation("precomputed segmenter requires a segment map path");
}

// ---------------------------------------------------------------------------
// Blur

ImageBuffer gaussian_blur(const ImageBuffer& image, double sigma) {
  if (!(sigma > 0) || image.empty()) return image;
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;

  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  std::vector<double> tmp(image.data().size());
  auto idx = [&](int x, int y, int c) {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(ch) + static_cast<std::size_t>(c);
  };
  const auto src = image.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = std::clamp(x + k, 0, w - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * src[idx(xx, y, c)];
        }
        tmp[idx(x, y, c)] = acc;
      }
  std::vector<float> out(tmp.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = std::clamp(y + k, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[idx(x, yy, c)];
        }
        out[idx(x, y, c)] = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  return ImageBuffer(w, h, ch, std::move(out));
}

// ---------------------------------------------------------------------------
// Shared helpers

SegmentMap canonicalize_labels(int width, int height, std::span<const SegmentId> labels) {
  std::vector<SegmentId> remap;
  std::vector<SegmentId> out(labels.size());
  SegmentId next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    if (l >= remap.size()) remap.resize(l + 1, -1);
    if (remap[l] < 0) remap[l] = next++;
    out[i] = remap[l];
  }
  return SegmentMap(width, height, std::move(out));
}

namespace {

// 4-connected components of equal labels; returns component id per pixel and
// the number of components. Components are numbered in raster order.
int label_components(int w, int h, std::span<const SegmentId> labels,
                     std::vector<int>& comp) {
  comp.assign(labels.size(), -1);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(p % static_cast<std::size_t>(w));
      const int y = static_cast<int>(p / static_cast<std::size_t>(w));
      const std::size_t nbrs[4] = {
          x > 0 ? p - 1 : p, x + 1 < w ? p + 1 : p,
          y > 0 ? p - static_cast<std::size_t>(w) : p,
          y + 1 < h ? p + static_cast<std::size_t>(w) : p};
      for (std::size_t q : nbrs) {
        if (q == p || comp[q] >= 0 || labels[q] != labels[p]) continue;
        comp[q] = count;
        stack.push_back(q);
      }
    }
    ++count;
  }
  return count;
}

// Keeps the largest fragment of every label and merges the others into the
// largest adjacent segment (ties: lowest label). Fragments surrounded only by
// other unresolved fragments wait for a later sweep.
void enforce_connectivity(int w, int h, std::vector<SegmentId>& labels) {
  std::vector<int> comp;
  const int ncomp = label_components(w, h, labels, comp);
  std::vector<std::size_t> comp_size(static_cast<std::size_t>(ncomp), 0);
  std::vector<SegmentId> comp_label(static_cast<std::size_t>(ncomp), -1);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    ++comp_size[static_cast<std::size_t>(comp[p])];
    comp_label[static_cast<std::size_t>(comp[p])] = labels[p];
  }
  const SegmentId max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<int> keeper(static_cast<std::size_t>(max_label) + 1, -1);
  for (int c = 0; c < ncomp; ++c) {
    auto& k = keeper[static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)])];
    if (k < 0 || comp_size[static_cast<std::size_t>(c)] > comp_size[static_cast<std::size_t>(k)]) k = c;
  }
  // Final label per component; -1 while unresolved.
  std::vector<SegmentId> resolved(static_cast<std::size_t>(ncomp), -1);
  std::vector<std::size_t> segment_size(static_cast<std::size_t>(max_label) + 1, 0);
  for (int c = 0; c < ncomp; ++c) {
    if (keeper[static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)])] == c) {
      resolved[static_cast<std::size_t>(c)] = comp_label[static_cast<std::size_t>(c)];
      segment_size[static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)])] +=
          comp_size[static_cast<std::size_t>(c)];
    }
  }
  // Adjacent components per fragment.
  std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(ncomp));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const std::size_t right = p + 1;
      const std::size_t down = p + static_cast<std::size_t>(w);
      if (x + 1 < w && comp[right] != comp[p]) {
        adjacent[static_cast<std::size_t>(comp[p])].push_back(comp[right]);
        adjacent[static_cast<std::size_t>(comp[right])].push_back(comp[p]);
      }
      if (y + 1 < h && comp[down] != comp[p]) {
        adjacent[static_cast<std::size_t>(comp[p])].push_back(comp[down]);
        adjacent[static_cast<std::size_t>(comp[down])].push_back(comp[p]);
      }
    }
  bool pending = true;
  while (pending) {
    pending = false;
    bool progressed = false;
    for (int c = 0; c < ncomp; ++c) {
      if (resolved[static_cast<std::size_t>(c)] >= 0) continue;
      SegmentId best = -1;
      for (int n : adjacent[static_cast<std::size_t>(c)]) {
        const SegmentId l = resolved[static_cast<std::size_t>(n)];
        if (l < 0) continue;
        if (best < 0 || segment_size[static_cast<std::size_t>(l)] > segment_size[static_cast<std::size_t>(best)] ||
            (segment_size[static_cast<std::size_t>(l)] == segment_size[static_cast<std::size_t>(best)] && l < best))
          best = l;
      }
      if (best < 0) {
        pending = true;
        continue;
      }
      resolved[static_cast<std::size_t>(c)] = best;
      segment_size[static_cast<std::size_t>(best)] += comp_size[static_cast<std::size_t>(c)];
      progressed = true;
    }
    if (pending && !progressed) break;  // unreachable on a connected grid
  }
  for (std::size_t p = 0; p < labels.size(); ++p)
    labels[p] = resolved[static_cast<std::size_t>(comp[p])];
}

void check_image(const ImageBuffer& image) {
  if (image.empty() || image.width() <= 0 || image.height() <= 0)
    throw ContractViolation("segmentation: image is empty");
}

}  // namespace

bool segments_connected(const SegmentMap& segmap) {
  std::vector<int> comp;
  const int ncomp = label_components(segmap.width(), segmap.height(), segmap.labels(), comp);
  return ncomp == segmap.segment_count();
}

// ---------------------------------------------------------------------------
// SLIC

SegmentMap segment_slic(const ImageBuffer& image, const SlicParams& params) {
  check_image(image);
  if (params.n_segments < 1) throw ContractViolation("slic: n_segments must be >= 1");
  if (!(params.compactness > 0)) throw ContractViolation("slic: compactness must be > 0");
  if (static_cast<std::size_t>(params.n_segments) > image.pixel_count())
    throw ContractViolation("slic: n_segments exceeds pixel count");

  constexpr double kColourScale = 100.0;
  const ImageBuffer smooth = gaussian_blur(image, params.sigma);
  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  const double n_pixels = static_cast<double>(image.pixel_count());
  const double step = std::sqrt(n_pixels / params.n_segments);

  // Grid of nx * ny seeds approximating n_segments with the image aspect.
  const int k = params.n_segments;
  int nx = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k) * w / h)));
  nx = std::clamp(nx, 1, std::min(k, w));
  int ny = static_cast<int>(std::lround(static_cast<double>(k) / nx));
  ny = std::clamp(ny, 1, h);

  struct Center {
    double x, y;
    double colour[3];
  };
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Center c{};
      c.x = (i + 0.5) * w / nx;
      c.y = (j + 0.5) * h / ny;
      const int px = std::clamp(static_cast<int>(c.x), 0, w - 1);
      const int py = std::clamp(static_cast<int>(c.y), 0, h - 1);
      for (int q = 0; q < ch; ++q) c.colour[q] = kColourScale * smooth.at(px, py, q);
      centers.push_back(c);
    }

  const double spatial_weight = params.compactness / step;
  const double sw2 = spatial_weight * spatial_weight;
  const int window = static_cast<int>(std::ceil(2.0 * std::max(step, static_cast<double>(w) / nx) )) + 1;
  const int window_y = static_cast<int>(std::ceil(2.0 * std::max(step, static_cast<double>(h) / ny))) + 1;
  std::vector<SegmentId> labels(image.pixel_count(), -1);
  std::vector<double> best(image.pixel_count());

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    std::fill(labels.begin(), labels.end(), -1);
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      const Center& c = centers[ci];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x - window)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + window)));
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y - window_y)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + window_y)));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          double dc = 0.0;
          for (int q = 0; q < ch; ++q) {
            const double d = kColourScale * smooth.at(x, y, q) - c.colour[q];
            dc += d * d;
          }
          const double dx = x + 0.5 - c.x;
          const double dy = y + 0.5 - c.y;
          const double dist = dc + sw2 * (dx * dx + dy * dy);
          const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
          // Strict comparison: on ties the lower-indexed centre wins.
          if (dist < best[p]) {
            best[p] = dist;
            labels[p] = static_cast<SegmentId>(ci);
          }
        }
    }
    // Pixels outside every window fall back to the nearest centre in space.
    for (std::size_t p = 0; p < labels.size(); ++p) {
      if (labels[p] >= 0) continue;
      const double px = static_cast<double>(p % static_cast<std::size_t>(w)) + 0.5;
      const double py = static_cast<double>(p / static_cast<std::size_t>(w)) + 0.5;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        const double d = (px - centers[ci].x) * (px - centers[ci].x) +
                         (py - centers[ci].y) * (py - centers[ci].y);
        if (d < bd) {
          bd = d;
          labels[p] = static_cast<SegmentId>(ci);
        }
      }
    }
    // Update step.
    std::vector<double> acc(centers.size() * 5, 0.0);
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      const auto l = static_cast<std::size_t>(labels[p]);
      const int x = static_cast<int>(p % static_cast<std::size_t>(w));
      const int y = static_cast<int>(p / static_cast<std::size_t>(w));
      acc[l * 5 + 0] += x + 0.5;
      acc[l * 5 + 1] += y + 0.5;
      for (int q = 0; q < ch; ++q) acc[l * 5 + 2 + static_cast<std::size_t>(q)] += kColourScale * smooth.at(x, y, q);
      ++count[l];
    }
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (count[ci] == 0) continue;
      const double n = static_cast<double>(count[ci]);
      centers[ci].x = acc[ci * 5 + 0] / n;
      centers[ci].y = acc[ci * 5 + 1] / n;
      for (int q = 0; q < ch; ++q) centers[ci].colour[q] = acc[ci * 5 + 2 + static_cast<std::size_t>(q)] / n;
    }
  }

  enforce_connectivity(w, h, labels);
  return canonicalize_labels(w, h, labels);
}

// ---------------------------------------------------------------------------
// Felzenszwalb

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Lower root index becomes the representative.
  std::size_t join(std::size_t a, std::size_t b, double weight) {
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = std::max({internal_[a], internal_[b], weight});
    return a;
  }
  std::size_t size(std::size_t root) const { return size_[root]; }
  double internal(std::size_t root) const { return internal_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<double> internal_;
};

struct PixelEdge {
  double weight;
  std::size_t a;
  std::size_t b;
};

}  // namespace

SegmentMap segment_felzenszwalb(const ImageBuffer& image, const FelzenszwalbParams& params) {
  check_image(image);
  if (!(params.scale > 0)) throw ContractViolation("felzenszwalb: scale must be > 0");
  if (params.min_size < 1) throw ContractViolation("felzenszwalb: min_size must be >= 1");
  if (!(params.sigma >= 0)) throw ContractViolation("felzenszwalb: sigma must be >= 0");

  constexpr double kColourScale = 255.0;
  const ImageBuffer smooth = gaussian_blur(image, params.sigma);
  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  auto distance = [&](int x0, int y0, int x1, int y1) {
    double d2 = 0.0;
    for (int q = 0; q < ch; ++q) {
      const double d = kColourScale * (static_cast<double>(smooth.at(x0, y0, q)) - smooth.at(x1, y1, q));
      d2 += d * d;
    }
    return std::sqrt(d2);
  };

  std::vector<PixelEdge> edges;
  edges.reserve(image.pixel_count() * 4);
  auto id = [w](int x, int y) {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) edges.push_back({distance(x, y, x + 1, y), id(x, y), id(x + 1, y)});
      if (y + 1 < h) edges.push_back({distance(x, y, x, y + 1), id(x, y), id(x, y + 1)});
      if (x + 1 < w && y + 1 < h)
        edges.push_back({distance(x, y, x + 1, y + 1), id(x, y), id(x + 1, y + 1)});
      if (x > 0 && y + 1 < h)
        edges.push_back({distance(x, y, x - 1, y + 1), id(x, y), id(x - 1, y + 1)});
    }
  // Equal weights keep generation order.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const PixelEdge& l, const PixelEdge& r) { return l.weight < r.weight; });

  DisjointSets sets(image.pixel_count());
  for (const PixelEdge& e : edges) {
    std::size_t a = sets.find(e.a);
    std::size_t b = sets.find(e.b);
    if (a == b) continue;
    const double ta = sets.internal(a) + params.scale / static_cast<double>(sets.size(a));
    const double tb = sets.internal(b) + params.scale / static_cast<double>(sets.size(b));
    if (e.weight <= std::min(ta, tb)) sets.join(a, b, e.weight);
  }
  // Ascending order means a small component meets its cheapest boundary
  // edge first.
  const auto min_size = static_cast<std::size_t>(params.min_size);
  for (const PixelEdge& e : edges) {
    std::size_t a = sets.find(e.a);
    std::size_t b = sets.find(e.b);
    if (a == b) continue;
    if (sets.size(a) < min_size || sets.size(b) < min_size) sets.join(a, b, e.weight);
  }

  std::vector<SegmentId> labels(image.pixel_count());
  for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = static_cast<SegmentId>(sets.find(p));
  return canonicalize_labels(w, h, labels);
}

// ---------------------------------------------------------------------------
// Dispatch and precomputed maps

SegmentMap segment(const ImageBuffer& image, const SegmenterConfig& cfg, Warnings* warnings) {
  cfg.validate();
  switch (cfg.algorithm) {
    case SegmenterAlgorithm::slic: return segment_slic(image, cfg.slic);
    case SegmenterAlgorithm::felzenszwalb: return segment_felzenszwalb(image, cfg.felzenszwalb);
    case SegmenterAlgorithm::precomputed: {
      SegmentMap map = load_precomputed(cfg.precomputed_path, warnings);
      if (map.width() != image.width() || map.height() != image.height())
        throw ContractViolation("precomputed segment map dimensions differ from the image");
      return map;
    }
  }
  throw ContractViolation("unknown segmenter");
}

SegmentMap parse_precomputed(const std::string& text, Warnings* warnings) {
  std::istringstream in(text);
  long long w = 0;
  long long h = 0;
  if (!(in >> w >> h) || w <= 0 || h <= 0 || w > 1 << 20 || h > 1 << 20)
    throw FormatError("segment map: header must be 'width height' with positive values");
  std::vector<SegmentId> labels;
  labels.reserve(static_cast<std::size_t>(w * h));
  std::string token;
  while (in >> token) {
    long long v = 0;
    try {
      std::size_t used = 0;
      v = std::stoll(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw FormatError("segment map: bad label '" + token + "'");
    }
    if (v < 0) throw FormatError("segment map: negative label " + token);
    if (v > std::numeric_limits<SegmentId>::max()) throw FormatError("segment map: label too large");
    labels.push_back(static_cast<SegmentId>(v));
  }
  if (labels.size() != static_cast<std::size_t>(w * h))
    throw FormatError("segment map: expected " + std::to_string(w * h) + " labels, found " +
                      std::to_string(labels.size()));
  bool gaps = false;
  SegmentMap map = SegmentMap::from_labels_compacting(static_cast<int>(w), static_cast<int>(h),
                                                      std::move(labels), &gaps);
  if (gaps) warn(warnings, "segment map: label gaps closed by relabelling");
  return map;
}

SegmentMap load_precomputed(const std::string& path, Warnings* warnings) {
  std::ifstream in(path);
  if (!in) throw FormatError("segment map: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_precomputed(buf.str(), warnings);
}

void save_precomputed(const std::string& path, const SegmentMap& segmap) {
  std::ofstream out(path);
  if (!out) throw FormatError("segment map: cannot create " + path);
  out << segmap.width() << ' ' << segmap.height() << '\n';
  for (int y = 0; y < segmap.height(); ++y) {
    for (int x = 0; x < segmap.width(); ++x) {
      if (x > 0) out << ' ';
      out << segmap.at(x, y);
    }
    out << '\n';
  }
}

}  // namespace mindful
