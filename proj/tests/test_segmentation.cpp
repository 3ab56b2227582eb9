#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "mindful/segmentation.hpp"
#include "test_support.hpp"

using namespace mindful;
using mindful::testing::constant_image;
using mindful::testing::random_image;

namespace {

ImageBuffer quadrants(int n) {
  ImageBuffer img(n, n, 1);
  const float levels[4] = {0.1f, 0.4f, 0.7f, 0.95f};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) img.at(x, y) = levels[(y >= n / 2 ? 2 : 0) + (x >= n / 2 ? 1 : 0)];
  return img;
}

int quadrant_of(int x, int y, int n) { return (y >= n / 2 ? 2 : 0) + (x >= n / 2 ? 1 : 0); }

void check_partition(const SegmentMap& s) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(s.segment_count()), 0);
  for (SegmentId l : s.labels()) {
    REQUIRE(l >= 0);
    REQUIRE(l < s.segment_count());
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (auto n : sizes) CHECK(n > 0);
}

}  // namespace

TEST_CASE("blur leaves constant images unchanged") {
  const auto img = constant_image(9, 7, 0.3f, 3);
  const auto b = gaussian_blur(img, 2.0);
  for (float v : b.data()) CHECK(v == doctest::Approx(0.3f).epsilon(1e-6));
  CHECK(gaussian_blur(img, 0.0) == img);
}

TEST_CASE("slic: constant image with one segment") {
  SlicParams p;
  p.n_segments = 1;
  const auto s = segment_slic(constant_image(32, 32, 0.5f), p);
  CHECK(s.segment_count() == 1);
}

TEST_CASE("slic: four uniform quadrants") {
  SlicParams p;
  p.n_segments = 4;
  p.compactness = 80;
  p.sigma = 0.0;
  const int n = 64;
  const auto s = segment_slic(quadrants(n), p);
  REQUIRE(s.segment_count() == 4);
  // Each segment is a subset of one quadrant and covers it.
  std::vector<std::set<int>> quads(4);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) quads[static_cast<std::size_t>(s.at(x, y))].insert(quadrant_of(x, y, n));
  std::set<int> seen;
  for (const auto& q : quads) {
    CHECK(q.size() == 1);
    seen.insert(*q.begin());
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("slic: contract violations") {
  SlicParams p;
  p.n_segments = 17;
  CHECK_THROWS_AS(segment_slic(constant_image(4, 4, 0.f), p), ContractViolation);
  CHECK_THROWS_AS(segment_slic(ImageBuffer(), SlicParams{}), ContractViolation);
}

TEST_CASE("felzenszwalb: constant image is one segment") {
  FelzenszwalbParams p;
  p.min_size = 10;
  CHECK(segment_felzenszwalb(constant_image(16, 16, 0.7f), p).segment_count() == 1);
}

TEST_CASE("felzenszwalb: black/white halves split exactly") {
  ImageBuffer img(32, 32, 1);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) img.at(x, y) = 1.0f;
  FelzenszwalbParams p;
  p.scale = 1.0;
  p.min_size = 1;
  p.sigma = 0.0;
  const auto s = segment_felzenszwalb(img, p);
  REQUIRE(s.segment_count() == 2);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) CHECK(s.at(x, y) == (x < 16 ? 0 : 1));
}

TEST_CASE("segmenters produce canonical connected partitions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 24);
    const int h = 8 + static_cast<int>(rng() % 24);
    const auto img = random_image(w, h, (trial % 2) != 0 ? 3 : 1, rng());
    SlicParams sp;
    sp.n_segments = 1 + static_cast<int>(rng() % 20);
    sp.sigma = 1.0;
    const auto s = segment_slic(img, sp);
    check_partition(s);
    CHECK(s.segment_count() <= 2 * sp.n_segments);
    CHECK(segments_connected(s));
    CHECK(s == canonicalize_labels(w, h, s.labels()));

    FelzenszwalbParams fp;
    fp.scale = 100;
    fp.min_size = 1 + static_cast<int>(rng() % 30);
    const auto f = segment_felzenszwalb(img, fp);
    check_partition(f);
    for (SegmentId l = 0; l < f.segment_count(); ++l)
      CHECK(f.segment_size(l) >= static_cast<std::size_t>(fp.min_size));
    CHECK(f == segment_felzenszwalb(img, fp));
  }
}

TEST_CASE("precomputed maps") {
  Warnings w;
  CHECK(parse_precomputed("2 1\n0 1\n", &w).segment_count() == 2);
  CHECK(w.empty());
  const auto g = parse_precomputed("2 1\n0 2\n", &w);
  CHECK(g.segment_count() == 2);
  CHECK(g.at(1, 0) == 1);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(parse_precomputed("2 1\n0 -1\n"), FormatError);
  CHECK_THROWS_AS(parse_precomputed("2 2\n0 1\n"), FormatError);
  CHECK_THROWS_AS(parse_precomputed("x"), FormatError);

  const auto dir = std::filesystem::temp_directory_path() / "mindful_test_seg";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "map.txt").string();
  const SegmentMap m(3, 2, {0, 0, 1, 2, 2, 1});
  save_precomputed(path, m);
  CHECK(load_precomputed(path) == m);

  SegmenterConfig cfg;
  cfg.algorithm = SegmenterAlgorithm::precomputed;
  cfg.precomputed_path = path;
  CHECK(segment(constant_image(3, 2, 0.f), cfg) == m);
  CHECK_THROWS_AS(segment(constant_image(2, 3, 0.f), cfg), ContractViolation);
}

TEST_CASE("segmenter names") {
  CHECK(parse_segmenter("slic") == SegmenterAlgorithm::slic);
  CHECK(to_string(SegmenterAlgorithm::felzenszwalb) == "felzenszwalb");
  CHECK_THROWS_AS(parse_segmenter("quickshift"), ContractViolation);
}
