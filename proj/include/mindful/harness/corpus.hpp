#pragma once

// Synthetic corpora: dark noisy images with a bright rectangle planted at
// each present class's secret region, matching annotation boxes and a
// builtin-patch classifier that looks at exactly those regions.
//
// On disk:
//   <dir>/images/<id>.png
//   <dir>/annotations.csv
//   <dir>/classifier.json
//   <dir>/calibration/images/<id>.png
//   <dir>/calibration/annotations.csv

#include <cstdint>
#include <string>
#include <vector>

#include "mindful/classifier.hpp"
#include "mindful/core.hpp"

namespace mindful::harness {

struct CorpusImage {
  std::string id;
  ImageBuffer image;
};

struct Corpus {
  std::vector<CorpusImage> images;  // sorted by id
  AnnotationSet annotations;

  const CorpusImage* find(const std::string& id) const;
  // Classes with at least one box on the image, sorted.
  std::vector<std::string> labels_of(const std::string& id) const;
};

struct CorpusClass {
  std::string id;
  // Fractions of width/height; converted with floor/ceil.
  double x0, y0, x1, y1;
};

struct CorpusSpec {
  std::size_t count = 60;
  std::size_t calibration_count = 20;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 1;
  double prevalence = 0.7;     // chance each class is present
  int distractors = 2;         // bright blobs away from every region
  double noise = 0.04;         // std-dev of background noise
  double background = 0.15;
  double lesion_min = 0.75;    // planted intensity range
  double lesion_max = 0.95;
  double a = 10.0;
  double b = -5.0;
  std::vector<CorpusClass> classes = {{"Opacity", 0.15, 0.20, 0.45, 0.55},
                                      {"Effusion", 0.55, 0.45, 0.85, 0.80}};

  void validate() const;
};

struct GeneratedCorpus {
  Corpus main;
  Corpus calibration;
  PatchClassifier classifier;
};

GeneratedCorpus generate_corpus(const CorpusSpec& spec);

void write_corpus(const GeneratedCorpus& corpus, const std::string& dir);

// Reads <dir>/images/*.png (in name order) and <dir>/annotations.csv. A
// missing annotations file yields an empty set.
Corpus load_corpus(const std::string& dir);

std::vector<CalibrationSample> calibration_samples(const Corpus& corpus);

}  // namespace mindful::harness
