#include "doctest.h"

#include <cmath>
#include <random>

#include "mindful/metrics.hpp"

using namespace mindful;

namespace {

BinaryPixelMask bits(int w, int h, std::initializer_list<int> on) {
  BinaryPixelMask m(w, h);
  for (int i : on) m.set(static_cast<std::size_t>(i));
  return m;
}

// H(M) - (H(p) + H(q)) / 2, an algebraically independent form.
double js_entropy_form(const std::vector<double>& p, const std::vector<double>& q) {
  auto h = [](const std::vector<double>& d) {
    double s = 0;
    for (double v : d)
      if (v > 0) s -= v * std::log2(v);
    return s;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return h(m) - 0.5 * (h(p) + h(q));
}

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(n);
  double sum = 0;
  for (auto& v : d) {
    v = (sparse && u(rng) < 0.5) ? 0.0 : u(rng);
    sum += v;
  }
  if (sum == 0) {
    d[0] = 1;
    sum = 1;
  }
  for (auto& v : d) v /= sum;
  return d;
}

}  // namespace

TEST_CASE("iou fixtures") {
  const auto a = bits(4, 2, {0, 1, 2, 3});
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, bits(4, 2, {4, 5})) == 0.0);
  CHECK(iou(a, bits(4, 2, {2, 3, 4, 5})) == 2.0 / 6.0);
  Warnings w;
  CHECK(iou(BinaryPixelMask(4, 2), BinaryPixelMask(4, 2), &w) == 1.0);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(iou(a, BinaryPixelMask(2, 4)), ContractViolation);
}

TEST_CASE("iou is symmetric and bounded on random masks") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    BinaryPixelMask p(5, 5), q(5, 5);
    for (std::size_t i = 0; i < 25; ++i) {
      p.set(i, rng() % 2 == 0);
      q.set(i, rng() % 3 == 0);
    }
    CHECK(iou(p, q) == iou(q, p));
    CHECK(iou(p, q) >= 0.0);
    CHECK(iou(p, q) <= 1.0);
  }
}

TEST_CASE("to_distribution") {
  const auto d = to_distribution(bits(4, 4, {1, 5, 9, 13}));
  CHECK(d.probabilities()[1] == 0.25);
  CHECK(d.probabilities()[0] == 0.0);
  CHECK(to_distribution(bits(2, 1, {1})).probabilities()[1] == 1.0);
  CHECK_THROWS_AS(to_distribution(BinaryPixelMask(2, 2)), ContractViolation);
  CHECK_THROWS_AS(PixelDistribution({0.5, 0.6}), ContractViolation);
}

TEST_CASE("kl divergence") {
  const PixelDistribution p({0.9, 0.1});
  const PixelDistribution q({0.5, 0.5});
  CHECK(kl_div(p, p) == 0.0);
  // Hand evaluation, base 2.
  const double pq = 0.9 * std::log2(1.8) + 0.1 * std::log2(0.2);
  const double qp = 0.5 * std::log2(0.5 / 0.9) + 0.5 * std::log2(5.0);
  CHECK(kl_div(p, q) == doctest::Approx(pq).epsilon(1e-9));
  CHECK(kl_div(q, p) == doctest::Approx(qp).epsilon(1e-9));
  CHECK(kl_div(p, q) == doctest::Approx(0.531).epsilon(1e-3));
  CHECK(kl_div(q, p) == doctest::Approx(0.737).epsilon(1e-3));
  CHECK(kl_div(p, q) != kl_div(q, p));

  const PixelDistribution a({1.0, 0.0});
  const PixelDistribution b({0.0, 1.0});
  CHECK(kl_div(a, b, 1e-12) == doctest::Approx(39.863).epsilon(1e-4));
  const std::vector<double> shorter = {1.0};
  CHECK_THROWS_AS(kl_div(a.probabilities(), std::span<const double>(shorter)), ContractViolation);
}

TEST_CASE("js divergence fixtures") {
  const PixelDistribution p({0.5, 0.5});
  const PixelDistribution q({1.0, 0.0});
  CHECK(js_div(p, p) == 0.0);
  CHECK(js_div(p, q) == doctest::Approx(0.31128).epsilon(1e-4));
  CHECK(std::abs(js_div(p, q) - 0.31128) < 1e-5);
  CHECK(js_div(p, q) == js_div(q, p));
  CHECK(std::abs(js_div(PixelDistribution({1.0, 0.0}), PixelDistribution({0.0, 1.0})) - 1.0) < 1e-9);
}

TEST_CASE("js divergence properties over random distributions") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 20;
    const auto p = random_distribution(rng, n, t % 2 == 0);
    const auto q = random_distribution(rng, n, t % 3 == 0);
    const double v = js_div(p, q);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == js_div(q, p));
    CHECK(js_div(p, p) == 0.0);
    CHECK(v == doctest::Approx(std::clamp(js_entropy_form(p, q), 0.0, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("localization precision") {
  const auto m = bits(4, 4, {0, 1, 4, 5});
  CHECK(localization_precision(m, m) == 1.0);
  CHECK(localization_precision(bits(2, 1, {0}), bits(2, 1, {1})) == doctest::Approx(0.0).epsilon(1e-12));
  // ex uniform over two pixels, gt on one of them.
  CHECK(localization_precision(bits(2, 1, {0}), bits(2, 1, {0, 1})) ==
        doctest::Approx(0.68872).epsilon(1e-4));
  Warnings w;
  CHECK(localization_precision(m, BinaryPixelMask(4, 4), &w) == 0.0);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(localization_precision(BinaryPixelMask(4, 4), m), ContractViolation);
}

TEST_CASE("stability score") {
  const auto a = bits(3, 3, {0, 1});
  const auto b = bits(3, 3, {7, 8});
  const std::vector<BinaryPixelMask> same(10, a);
  const auto r = stability_score(same);
  CHECK(r.stability == 1.0);
  CHECK(r.pairwise_iou.size() == 45);
  CHECK(stability_score(std::vector<BinaryPixelMask>{a, b}).stability == 0.0);
  CHECK(stability_score(std::vector<BinaryPixelMask>{a, a, b}).stability == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(stability_score(std::vector<BinaryPixelMask>{a}), ContractViolation);
  CHECK(mean_gt_iou(std::vector<BinaryPixelMask>{a, b}, a) == 0.5);
}

TEST_CASE("bounding-box mode") {
  // Two 8-connected components: an L shape and a single pixel.
  BinaryPixelMask m(5, 4);
  m.set(0, 0);
  m.set(0, 1);
  m.set(1, 1);
  m.set(4, 3);
  const auto boxes = component_boxes(m);
  REQUIRE(boxes.size() == 2);
  CHECK(boxes[0] == Box{0, 0, 2, 2});
  CHECK(boxes[1] == Box{4, 3, 5, 4});
  CHECK(to_bbox_mask(m).count() == 5);
  BinaryPixelMask diag(2, 2);
  diag.set(0, 0);
  diag.set(1, 1);
  CHECK(component_boxes(diag).size() == 1);
}
