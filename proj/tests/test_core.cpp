#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "mindful/core.hpp"
#include "mindful/csv.hpp"
#include "mindful/image_io.hpp"
#include "test_support.hpp"

using namespace mindful;
using mindful::testing::constant_image;
using mindful::testing::gray;
using mindful::testing::random_image;

namespace {

// Independent per-segment mean fill, straight from the definition.
ImageBuffer reference_mask(const ImageBuffer& img, const SegmentMap& seg, const MaskVector& m) {
  ImageBuffer out = img;
  for (SegmentId s = 0; s < seg.segment_count(); ++s) {
    if (m.active(static_cast<std::size_t>(s))) continue;
    for (int c = 0; c < img.channels(); ++c) {
      double sum = 0;
      int n = 0;
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
          if (seg.at(x, y) == s) {
            sum += img.at(x, y, c);
            ++n;
          }
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
          if (seg.at(x, y) == s) out.at(x, y, c) = static_cast<float>(sum / n);
    }
  }
  return out;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "mindful_test_core";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ImageBuffer enforces its invariants") {
  CHECK_THROWS_AS(ImageBuffer(2, 2, 1, std::vector<float>(3, 0.f)), ContractViolation);
  CHECK_THROWS_AS(ImageBuffer(1, 1, 1, {1.5f}), ContractViolation);
  CHECK_THROWS_AS(ImageBuffer(1, 1, 2, {0.f, 0.f}), ContractViolation);
  CHECK_NOTHROW(ImageBuffer(1, 1, 3, {0.f, 0.5f, 1.f}));
}

TEST_CASE("SegmentMap validates partitions") {
  CHECK_THROWS_AS(SegmentMap(2, 1, {0, 2}), ContractViolation);
  CHECK_THROWS_AS(SegmentMap(2, 1, {0, -1}), ContractViolation);
  CHECK_THROWS_AS(SegmentMap(2, 2, {0, 1}), ContractViolation);
  SegmentMap s(3, 1, {1, 0, 1});
  CHECK(s.segment_count() == 2);
  CHECK(s.segment_size(1) == 2);
  bool gaps = false;
  auto c = SegmentMap::from_labels_compacting(2, 1, {0, 2}, &gaps);
  CHECK(gaps);
  CHECK(c.segment_count() == 2);
}

TEST_CASE("apply_mask: all-ones mask is the identity") {
  const auto img = random_image(5, 4, 3, 7);
  SegmentMap seg(5, 4, std::vector<SegmentId>(20, 0));
  const auto out = apply_mask(img, seg, MaskVector::all_ones(1));
  CHECK(out == img);
}

TEST_CASE("apply_mask: single segment is replaced by its mean") {
  const auto img = gray(3, 1, {0.1f, 0.2f, 0.3f});
  SegmentMap seg(3, 1, {0, 0, 0});
  const auto out = apply_mask(img, seg, MaskVector(std::vector<std::uint8_t>{0}));
  for (float v : out.data()) CHECK(v == doctest::Approx(0.2f).epsilon(1e-6));
}

TEST_CASE("apply_mask: two segments, second deactivated") {
  const auto img = gray(4, 1, {0.1f, 0.9f, 0.2f, 0.6f});
  SegmentMap seg(4, 1, {0, 0, 1, 1});
  const auto out = apply_mask(img, seg, MaskVector(std::vector<std::uint8_t>{1, 0}));
  CHECK(out.at(0, 0) == 0.1f);
  CHECK(out.at(1, 0) == 0.9f);
  CHECK(out.at(2, 0) == doctest::Approx(0.4f).epsilon(1e-6));
  CHECK(out.at(3, 0) == doctest::Approx(0.4f).epsilon(1e-6));
}

TEST_CASE("apply_mask: contract violations") {
  const auto img = constant_image(2, 2, 0.5f);
  SegmentMap seg(2, 2, {0, 0, 1, 1});
  CHECK_THROWS_AS(apply_mask(img, seg, MaskVector::all_ones(3)), ContractViolation);
  SegmentMap other(4, 1, {0, 0, 1, 1});
  CHECK_THROWS_AS(apply_mask(img, other, MaskVector::all_ones(2)), ContractViolation);
}

TEST_CASE("apply_mask properties over random inputs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 9);
    const int h = 1 + static_cast<int>(rng() % 9);
    const int ch = (rng() % 2) != 0 ? 3 : 1;
    const auto img = random_image(w, h, ch, rng());
    std::vector<SegmentId> labels(static_cast<std::size_t>(w * h));
    const int k = 1 + static_cast<int>(rng() % 5);
    for (auto& l : labels) l = static_cast<SegmentId>(rng() % static_cast<unsigned>(k));
    const auto seg = SegmentMap::from_labels_compacting(w, h, labels);
    MaskVector m(static_cast<std::size_t>(seg.segment_count()));
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i, (rng() % 2) != 0);

    const auto once = apply_mask(img, seg, m);
    CHECK(once == reference_mask(img, seg, m));
    CHECK(apply_mask(once, seg, m) == once);  // idempotent
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (m.active(static_cast<std::size_t>(seg.at(x, y))))
          for (int c = 0; c < ch; ++c) CHECK(once.at(x, y, c) == img.at(x, y, c));
  }
}

TEST_CASE("boxes_to_pixel_mask examples") {
  AnnotationSet ann;
  ann.entries.push_back({"img", "A", {0, 0, 2, 2}});
  CHECK(boxes_to_pixel_mask(ann, "img", "A", 4, 4).count() == 4);

  AnnotationSet two;
  two.entries.push_back({"img", "A", {0, 0, 1, 1}});
  two.entries.push_back({"img", "A", {3, 3, 4, 4}});
  CHECK(boxes_to_pixel_mask(two, "img", "A", 4, 4).count() == 2);

  AnnotationSet overlap;
  overlap.entries.push_back({"img", "A", {0, 0, 2, 2}});
  overlap.entries.push_back({"img", "A", {1, 1, 3, 3}});
  CHECK(boxes_to_pixel_mask(overlap, "img", "A", 4, 4).count() == 7);

  Warnings w;
  const auto none = boxes_to_pixel_mask(ann, "img", "B", 4, 4, &w);
  CHECK(none.count() == 0);
  CHECK(w.size() == 1);

  AnnotationSet bad;
  bad.entries.push_back({"img", "A", {0, 0, 5, 2}});
  CHECK_THROWS_AS(boxes_to_pixel_mask(bad, "img", "A", 4, 4), ContractViolation);
}

TEST_CASE("boxes_to_pixel_mask of a union is the bitwise or") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto box = [&] {
      const int x0 = static_cast<int>(rng() % 8);
      const int y0 = static_cast<int>(rng() % 8);
      return Box{x0, y0, x0 + 1 + static_cast<int>(rng() % (8 - x0)),
                 y0 + 1 + static_cast<int>(rng() % (8 - y0))};
    };
    const Box a = box();
    const Box b = box();
    const std::vector<Box> both = {a, b};
    CHECK(boxes_to_pixel_mask(both, 9, 9) ==
          (boxes_to_pixel_mask(std::vector<Box>{a}, 9, 9) |
           boxes_to_pixel_mask(std::vector<Box>{b}, 9, 9)));
  }
}

TEST_CASE("PNG round trip at 8-bit precision") {
  const auto path = (temp_dir() / "rgb.png").string();
  std::vector<float> v;
  for (int i = 0; i < 4 * 3 * 3; ++i) v.push_back(static_cast<float>(i * 7 % 256) / 255.0f);
  const ImageBuffer img(4, 3, 3, v);
  save_png(path, img);
  const auto back = load_png(path);
  CHECK(back.width() == 4);
  CHECK(back.height() == 3);
  CHECK(back.channels() == 3);
  CHECK(back == img);
  CHECK_THROWS_AS(load_png((temp_dir() / "missing.png").string()), FormatError);
}

TEST_CASE("annotation CSV ingestion") {
  const auto path = (temp_dir() / "ann.csv").string();
  {
    std::ofstream out(path);
    out << "image_id,class_name,x_min,y_min,x_max,y_max\n"
        << "a,\"Pleural Effusion\",1,2,3,4\n"
        << "b,Cardiomegaly,0.5,0,10.2,5\n";
  }
  const auto ann = load_annotations(path);
  REQUIRE(ann.entries.size() == 2);
  CHECK(ann.entries[0].class_id == "Pleural Effusion");
  CHECK(ann.entries[0].box == Box{1, 2, 3, 4});
  CHECK(ann.entries[1].box == Box{0, 0, 11, 5});

  const auto copy = (temp_dir() / "ann_copy.csv").string();
  save_annotations(copy, ann);
  const auto again = load_annotations(copy);
  REQUIRE(again.entries.size() == 2);
  CHECK(again.entries[0].box == ann.entries[0].box);

  {
    std::ofstream out(path);
    out << "id,class,x0,y0,x1,y1\n";
  }
  CHECK_THROWS_AS(load_annotations(path), FormatError);
}

TEST_CASE("csv round trip with quoting") {
  const csv::Row row = {"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  const auto parsed = csv::parse(csv::format_row(row) + "\r\n" + csv::format_row(row) + "\n");
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0] == row);
  CHECK(parsed[1] == row);
  CHECK_THROWS_AS(csv::parse("\"open"), FormatError);
}
