#include "doctest.h"

#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "mindful/mindful_sampler.hpp"
#include "test_support.hpp"

using namespace mindful;
using mindful::testing::ConstantClassifier;
using mindful::testing::constant_image;

namespace {

Decision accept_all(const MaskVector&) { return {true, 1.0}; }

AdjacencyGraph path3() {
  const std::vector<Edge> e = {{0, 1}, {1, 2}};
  return AdjacencyGraph(3, e);
}

std::set<SegmentId> path_vertices(const SampleRecord& r) {
  std::set<SegmentId> s;
  for (const auto& e : r.path) {
    s.insert(e.first);
    s.insert(e.second);
  }
  return s;
}

std::set<SegmentId> zeros_of(const MaskVector& m) {
  std::set<SegmentId> s;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!m.active(i)) s.insert(static_cast<SegmentId>(i));
  return s;
}

bool induced_connected(const AdjacencyGraph& g, const std::set<SegmentId>& vs) {
  std::set<SegmentId> seen = {*vs.begin()};
  std::vector<SegmentId> stack = {*vs.begin()};
  while (!stack.empty()) {
    const SegmentId v = stack.back();
    stack.pop_back();
    for (SegmentId u : g.neighbours(v))
      if (vs.count(u) != 0 && seen.insert(u).second) stack.push_back(u);
  }
  return seen == vs;
}

}  // namespace

TEST_CASE("decision module is a strict threshold") {
  const ConstantClassifier half({{"A", 0.50}});
  const auto img = constant_image(2, 2, 0.f);
  CHECK(decision_module(half, img, "A", 0.42));
  const ConstantClassifier at({{"A", 0.42}});
  CHECK_FALSE(decision_module(at, img, "A", 0.42));
  const ConstantClassifier zero({{"A", 0.0}});
  CHECK_FALSE(decision_module(zero, img, "A", 0.0));
  CHECK_THROWS_AS(decision_module(half, img, "B", 0.5), ContractViolation);
  CHECK_THROWS_AS(decision_module(half, img, "A", 1.5), ContractViolation);
}

TEST_CASE("phase 1 on a 3-vertex path") {
  const auto g = path3();
  const auto all = generate_phase1(g, 3, accept_all);
  CHECK(all.table.size() == 3);
  CHECK(all.pruned == g);

  const auto none = generate_phase1(g, 3, [](const MaskVector&) { return Decision{}; });
  CHECK(none.table.empty());
  CHECK(none.pruned.vertex_count() == 0);
  CHECK(none.pruned.edge_count() == 0);

  const auto reject_b = generate_phase1(g, 3, [](const MaskVector& m) {
    return Decision{m.active(1), 0.9};
  });
  REQUIRE(reject_b.table.size() == 2);
  CHECK(reject_b.table[0].path == std::vector<Edge>{{0, 0}});
  CHECK(reject_b.table[1].path == std::vector<Edge>{{2, 2}});
  CHECK(reject_b.pruned.vertices() == std::vector<SegmentId>{0, 2});
  CHECK(reject_b.pruned.edge_count() == 0);
}

TEST_CASE("hand-traced 3-vertex path, two levels") {
  MindfulConfig cfg;
  cfg.max_level = 2;
  const auto t = generate(path3(), 3, cfg, accept_all);
  const std::string expected =
      "{\"path\":[[0,0]],\"mask\":[0,1,1],\"processed\":true}\n"
      "{\"path\":[[1,1]],\"mask\":[1,0,1],\"processed\":true}\n"
      "{\"path\":[[2,2]],\"mask\":[1,1,0],\"processed\":true}\n"
      "{\"path\":[[0,0],[0,1]],\"mask\":[0,0,1],\"processed\":true}\n"
      "{\"path\":[[1,1],[1,0]],\"mask\":[0,0,1],\"processed\":true}\n"
      "{\"path\":[[1,1],[1,2]],\"mask\":[1,0,0],\"processed\":true}\n"
      "{\"path\":[[2,2],[2,1]],\"mask\":[1,0,0],\"processed\":true}\n";
  CHECK(serialize_sample_table(t) == expected);
  CHECK(dedupe_by_mask(t).size() == 5);
}

TEST_CASE("max_level 1 stops after phase 1") {
  MindfulConfig cfg;
  cfg.max_level = 1;
  const auto t = generate(path3(), 3, cfg, accept_all);
  REQUIRE(t.size() == 3);
  for (const auto& r : t) {
    CHECK(r.path.size() == 1);
    CHECK(r.processed);
  }
}

TEST_CASE("single isolated vertex") {
  const AdjacencyGraph g(1, std::vector<Edge>{});
  CHECK(generate(g, 1, MindfulConfig{}, accept_all).size() == 1);
}

TEST_CASE("star K1,3 gives ten records") {
  const std::vector<Edge> e = {{0, 1}, {0, 2}, {0, 3}};
  const auto t = generate(AdjacencyGraph(4, e), 4, MindfulConfig{}, accept_all);
  CHECK(t.size() == 10);
}

TEST_CASE("serialized tables round trip") {
  const auto t = generate(path3(), 3, MindfulConfig{}, accept_all);
  std::istringstream in(serialize_sample_table(t));
  const auto back = read_sample_table(in);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back[i].path == t[i].path);
    CHECK(back[i].value == t[i].value);
    CHECK(back[i].processed == t[i].processed);
  }
  std::istringstream bad("{\"path\":[[0]],\"mask\":[0]}\n");
  CHECK_THROWS_AS(read_sample_table(bad), FormatError);
}

TEST_CASE("sampler invariants on random graphs and decisions") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 9);
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 3 == 0) edges.push_back({a, b});
    const AdjacencyGraph g(n, edges);
    MindfulConfig cfg;
    cfg.max_level = 1 + static_cast<int>(rng() % 4);
    const std::uint64_t salt = rng();
    // Pseudo-random but pure function of the mask.
    const DecisionFunction decide = [salt](const MaskVector& m) {
      std::uint64_t h = salt;
      for (auto b : m.bits()) h = h * 1099511628211ULL + b + 1;
      return Decision{(h >> 33) % 4 != 0, 0.75};
    };
    const auto t = generate(g, static_cast<std::size_t>(n), cfg, decide);
    const auto again = generate(g, static_cast<std::size_t>(n), cfg, decide);
    CHECK(serialize_sample_table(t) == serialize_sample_table(again));

    std::set<SegmentId> rejected;
    for (SegmentId v = 0; v < n; ++v) {
      MaskVector m = MaskVector::all_ones(static_cast<std::size_t>(n));
      m.set(static_cast<std::size_t>(v), false);
      if (!decide(m).accepted) rejected.insert(v);
    }
    std::set<std::vector<Edge>> paths;
    for (const auto& r : t) {
      REQUIRE(!r.path.empty());
      CHECK(r.path.front().first == r.path.front().second);
      CHECK(zeros_of(r.value) == path_vertices(r));
      CHECK(r.value.zeros() >= 1);
      CHECK(r.value.zeros() <= static_cast<std::size_t>(cfg.max_level));
      CHECK(decide(r.value).accepted);
      CHECK(induced_connected(g, zeros_of(r.value)));
      for (SegmentId v : rejected) CHECK(r.value.active(static_cast<std::size_t>(v)));
      for (std::size_t i = 1; i < r.path.size(); ++i) CHECK(r.path[i].first == r.path[i - 1].second);
      std::set<std::pair<int, int>> unordered;
      for (const auto& e : r.path)
        CHECK(unordered.insert({std::min(e.first, e.second), std::max(e.first, e.second)}).second);
      CHECK(paths.insert(r.path).second);
      CHECK(r.processed);
    }
    CHECK(static_cast<double>(t.size()) <=
          sample_count_bound(static_cast<std::size_t>(n), g.max_degree(), cfg.max_level));
  }
}

TEST_CASE("generation terminates without a practical level cap") {
  // K4 with every sample accepted.
  std::vector<Edge> e;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) e.push_back({a, b});
  MindfulConfig cfg;
  cfg.max_level = std::numeric_limits<int>::max();
  const auto t = generate(AdjacencyGraph(4, e), 4, cfg, accept_all);
  CHECK(t.size() > 4);
  for (const auto& r : t) CHECK(r.path.size() <= 7);  // 6 edges plus the self-pair
}

TEST_CASE("image-level generation matches the decider overload") {
  const SegmentMap seg(3, 1, {0, 1, 2});
  const ImageBuffer img(3, 1, 1, {0.2f, 0.9f, 0.4f});
  const ConstantClassifier c({{"A", 0.8}});
  MindfulConfig cfg;
  cfg.threshold = 0.5;
  const auto t = generate(img, seg, "A", c, cfg);
  CHECK(serialize_sample_table(t) == serialize_sample_table(generate(path3(), 3, cfg, accept_all)));
  for (const auto& r : t) CHECK(r.probability == 0.8);
  cfg.threshold = 0.9;
  CHECK(generate(img, seg, "A", c, cfg).empty());
  cfg.max_level = 0;
  CHECK_THROWS_AS(generate(img, seg, "A", c, cfg), ContractViolation);
}

TEST_CASE("sample count bound arithmetic") {
  CHECK(sample_count_bound(3, 2, 2) == 9.0);
  CHECK(sample_count_bound(4, 3, 1) == 4.0);
  CHECK(sample_count_bound(12, 11, 4) == 12.0 * (1 + 11 + 121 + 1331));
}
