#include "mindful/harness/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "mindful/csv.hpp"
#include "mindful/harness/io.hpp"
#include "mindful/image_io.hpp"

namespace mindful::harness {

namespace fs = std::filesystem;

const CorpusImage* Corpus::find(const std::string& id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const CorpusImage& c, const std::string& k) { return c.id < k; });
  return it != images.end() && it->id == id ? &*it : nullptr;
}

std::vector<std::string> Corpus::labels_of(const std::string& id) const {
  return annotations.classes_for(id);
}

void CorpusSpec::validate() const {
  if (count < 1) throw ContractViolation("corpus: count must be >= 1");
  if (width < 8 || height < 8) throw ContractViolation("corpus: images must be at least 8x8");
  if (!(prevalence >= 0 && prevalence <= 1)) throw ContractViolation("corpus: prevalence must lie in [0,1]");
  if (!(noise >= 0)) throw ContractViolation("corpus: noise must be >= 0");
  if (!(lesion_min <= lesion_max)) throw ContractViolation("corpus: lesion_min exceeds lesion_max");
  if (classes.empty()) throw ContractViolation("corpus: no classes");
  for (const auto& c : classes)
    if (!(0 <= c.x0 && c.x0 < c.x1 && c.x1 <= 1 && 0 <= c.y0 && c.y0 < c.y1 && c.y1 <= 1))
      throw ContractViolation("corpus: region of " + c.id + " must satisfy 0 <= min < max <= 1");
}

namespace {

Box to_box(const CorpusClass& c, int w, int h) {
  return Box{static_cast<int>(std::floor(c.x0 * w)), static_cast<int>(std::floor(c.y0 * h)),
             static_cast<int>(std::ceil(c.x1 * w)), static_cast<int>(std::ceil(c.y1 * h))};
}

bool overlaps(const Box& a, const Box& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

void generate_split(const CorpusSpec& spec, const std::vector<Box>& regions, const std::string& prefix,
                    std::size_t count, std::mt19937_64& rng, Corpus& out) {
  std::normal_distribution<double> noise(0.0, spec.noise);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int w = spec.width;
  const int h = spec.height;
  for (std::size_t n = 0; n < count; ++n) {
    char id[32];
    std::snprintf(id, sizeof id, "%s-%03zu", prefix.c_str(), n);
    ImageBuffer img(w, h, 1);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(x, y) = clamp01(spec.background + noise(rng));

    // Distractors never touch a secret region, so they carry no evidence.
    for (int d = 0; d < spec.distractors; ++d) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        const int bw = 4 + static_cast<int>(unit(rng) * (w / 6.0));
        const int bh = 4 + static_cast<int>(unit(rng) * (h / 6.0));
        const int bx = static_cast<int>(unit(rng) * (w - bw));
        const int by = static_cast<int>(unit(rng) * (h - bh));
        const Box blob{bx, by, bx + bw, by + bh};
        if (std::any_of(regions.begin(), regions.end(), [&](const Box& r) { return overlaps(r, blob); }))
          continue;
        const double level = 0.5 + 0.3 * unit(rng);
        for (int y = blob.y_min; y < blob.y_max; ++y)
          for (int x = blob.x_min; x < blob.x_max; ++x) img.at(x, y) = clamp01(level + noise(rng));
        break;
      }
    }

    for (std::size_t c = 0; c < regions.size(); ++c) {
      if (!(unit(rng) < spec.prevalence)) continue;
      const Box& r = regions[c];
      const double level = spec.lesion_min + (spec.lesion_max - spec.lesion_min) * unit(rng);
      for (int y = r.y_min; y < r.y_max; ++y)
        for (int x = r.x_min; x < r.x_max; ++x) img.at(x, y) = clamp01(level + noise(rng));
      out.annotations.entries.push_back({id, spec.classes[c].id, r});
    }
    out.images.push_back({id, std::move(img)});
  }
}

void write_split(const Corpus& c, const fs::path& dir) {
  fs::create_directories(dir / "images");
  for (const auto& img : c.images) {
    const fs::path target = dir / "images" / (img.id + ".png");
    const fs::path tmp = dir / "images" / (img.id + ".png.tmp");
    save_png(tmp.string(), img.image);
    fs::rename(tmp, target);
  }
  const fs::path ann = dir / "annotations.csv";
  const fs::path tmp = dir / "annotations.csv.tmp";
  save_annotations(tmp.string(), c.annotations);
  fs::rename(tmp, ann);
}

}  // namespace

GeneratedCorpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  std::vector<Box> regions;
  std::vector<PatchClassifier::ClassSpec> specs;
  for (const auto& c : spec.classes) {
    regions.push_back(to_box(c, spec.width, spec.height));
    specs.push_back({c.id, regions.back(), spec.a, spec.b});
  }
  std::mt19937_64 rng(spec.seed);
  Corpus main;
  Corpus calibration;
  generate_split(spec, regions, "img", spec.count, rng, main);
  generate_split(spec, regions, "cal", spec.calibration_count, rng, calibration);
  return {std::move(main), std::move(calibration),
          PatchClassifier(std::move(specs), spec.width, spec.height)};
}

void write_corpus(const GeneratedCorpus& corpus, const std::string& dir) {
  const fs::path root(dir);
  write_split(corpus.main, root);
  write_split(corpus.calibration, root / "calibration");
  atomic_write((root / "classifier.json").string(), patch_classifier_to_json(corpus.classifier).dump(2) + "\n");
}

Corpus load_corpus(const std::string& dir) {
  const fs::path root(dir);
  const fs::path images = root / "images";
  if (!fs::is_directory(images)) throw FormatError("corpus: missing directory " + images.string());
  Corpus c;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(images))
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) c.images.push_back({f.stem().string(), load_png(f.string())});
  const fs::path ann = root / "annotations.csv";
  if (fs::exists(ann)) c.annotations = load_annotations(ann.string());
  return c;
}

std::vector<CalibrationSample> calibration_samples(const Corpus& corpus) {
  std::vector<CalibrationSample> out;
  for (const auto& img : corpus.images) out.push_back({img.image, corpus.labels_of(img.id)});
  return out;
}

}  // namespace mindful::harness
