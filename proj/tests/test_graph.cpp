#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "mindful/graph.hpp"

using namespace mindful;

namespace {

// Adjacency by brute force over every pixel pair.
std::set<std::pair<int, int>> brute_adjacency(const SegmentMap& s, bool eight) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < s.height(); ++y)
    for (int x = 0; x < s.width(); ++x)
      for (int y2 = 0; y2 < s.height(); ++y2)
        for (int x2 = 0; x2 < s.width(); ++x2) {
          const int dx = std::abs(x - x2);
          const int dy = std::abs(y - y2);
          const bool near = eight ? (std::max(dx, dy) == 1) : (dx + dy == 1);
          if (!near) continue;
          const int a = s.at(x, y);
          const int b = s.at(x2, y2);
          if (a != b) out.insert({std::min(a, b), std::max(a, b)});
        }
  return out;
}

}  // namespace

TEST_CASE("2x2 grid of four segments") {
  SegmentMap s(2, 2, {0, 1, 2, 3});
  const auto g = build_graph(s);
  CHECK(g.vertex_count() == 4);
  const std::vector<Edge> expected = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  CHECK(g.edges() == expected);
}

TEST_CASE("single segment has no edges") {
  const auto g = build_graph(SegmentMap(3, 3, std::vector<SegmentId>(9, 0)));
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("vertical stripes form a path") {
  SegmentMap s(3, 2, {0, 1, 2, 0, 1, 2});
  const std::vector<Edge> expected = {{0, 1}, {1, 2}};
  CHECK(build_graph(s).edges() == expected);
}

TEST_CASE("diagonal contact only counts under 8-connectivity") {
  SegmentMap s(2, 2, {0, 1, 1, 0});
  // Labels 0 at (0,0),(1,1): segment 0 is itself only diagonally connected,
  // but that is fine for adjacency purposes.
  CHECK(build_graph(s, Connectivity::four).edges() == std::vector<Edge>{{0, 1}});
  SegmentMap d(3, 3, {0, 1, 1, 1, 1, 1, 1, 1, 2});
  CHECK(build_graph(d, Connectivity::four).edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("graph matches brute force adjacency on random maps") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 7);
    const int h = 1 + static_cast<int>(rng() % 7);
    std::vector<SegmentId> labels(static_cast<std::size_t>(w * h));
    for (auto& l : labels) l = static_cast<SegmentId>(rng() % 6);
    const auto s = SegmentMap::from_labels_compacting(w, h, labels);
    for (bool eight : {false, true}) {
      const auto g = build_graph(s, eight ? Connectivity::eight : Connectivity::four);
      std::set<std::pair<int, int>> got;
      for (const auto& e : g.edges()) got.insert({e.first, e.second});
      CHECK(got == brute_adjacency(s, eight));
      CHECK(g.vertex_count() == static_cast<std::size_t>(s.segment_count()));
      for (const auto& e : g.edges()) CHECK(e.first < e.second);
    }
  }
}

TEST_CASE("vertex removal and queries") {
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {1, 3}};
  AdjacencyGraph g(4, edges);
  CHECK(g.max_degree() == 3);
  CHECK(g.incident_edges(1) == std::vector<Edge>{{1, 0}, {1, 2}, {1, 3}});
  CHECK(g.connected());
  const auto h = g.without_vertex(1);
  CHECK_FALSE(h.contains(1));
  CHECK(h.vertices() == std::vector<SegmentId>{0, 2, 3});
  CHECK(h.edge_count() == 0);
  CHECK_FALSE(h.connected());
  CHECK(g.edge_count() == 3);  // original untouched
  CHECK_THROWS_AS(h.without_vertex(1), ContractViolation);
  const std::vector<Edge> loop = {{2, 2}};
  CHECK_THROWS_AS(AdjacencyGraph(3, loop), ContractViolation);
}

TEST_CASE("edge list dump") {
  SegmentMap s(3, 1, {0, 1, 2});
  std::ostringstream out;
  write_edge_list(out, build_graph(s));
  CHECK(out.str() == "0 1\n1 2\n");
}
