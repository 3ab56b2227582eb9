#include "mindful/graph.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace mindful {

AdjacencyGraph::AdjacencyGraph(int vertex_count, std::span<const Edge> edges)
    : present_(static_cast<std::size_t>(std::max(vertex_count, 0)), 1),
      adjacency_(static_cast<std::size_t>(std::max(vertex_count, 0))),
      vertex_count_(static_cast<std::size_t>(std::max(vertex_count, 0))) {
  for (const Edge& e : edges) {
    if (e.first == e.second) throw ContractViolation("graph: self-loop");
    require(e.first);
    require(e.second);
    adjacency_[static_cast<std::size_t>(e.first)].push_back(e.second);
    adjacency_[static_cast<std::size_t>(e.second)].push_back(e.first);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

void AdjacencyGraph::require(SegmentId v) const {
  if (!contains(v))
    throw ContractViolation("graph: vertex " + std::to_string(v) + " not present");
}

std::vector<SegmentId> AdjacencyGraph::vertices() const {
  std::vector<SegmentId> out;
  out.reserve(vertex_count_);
  for (std::size_t v = 0; v < present_.size(); ++v)
    if (present_[v] != 0) out.push_back(static_cast<SegmentId>(v));
  return out;
}

std::vector<Edge> AdjacencyGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t v = 0; v < adjacency_.size(); ++v)
    for (SegmentId u : adjacency_[v])
      if (static_cast<std::size_t>(u) > v) out.push_back({static_cast<SegmentId>(v), u});
  return out;
}

std::size_t AdjacencyGraph::edge_count() const noexcept {
  std::size_t degrees = 0;
  for (const auto& nbrs : adjacency_) degrees += nbrs.size();
  return degrees / 2;
}

std::span<const SegmentId> AdjacencyGraph::neighbours(SegmentId v) const {
  require(v);
  return adjacency_[static_cast<std::size_t>(v)];
}

std::size_t AdjacencyGraph::max_degree() const noexcept {
  std::size_t k = 0;
  for (const auto& nbrs : adjacency_) k = std::max(k, nbrs.size());
  return k;
}

std::vector<Edge> AdjacencyGraph::incident_edges(SegmentId v) const {
  std::vector<Edge> out;
  for (SegmentId u : neighbours(v)) out.push_back({v, u});
  return out;
}

void AdjacencyGraph::remove_vertex(SegmentId v) {
  require(v);
  for (SegmentId u : adjacency_[static_cast<std::size_t>(v)]) {
    auto& back = adjacency_[static_cast<std::size_t>(u)];
    back.erase(std::lower_bound(back.begin(), back.end(), v));
  }
  adjacency_[static_cast<std::size_t>(v)].clear();
  present_[static_cast<std::size_t>(v)] = 0;
  --vertex_count_;
}

bool AdjacencyGraph::connected() const {
  const auto verts = vertices();
  if (verts.size() <= 1) return true;
  std::vector<std::uint8_t> seen(present_.size(), 0);
  std::vector<SegmentId> stack{verts.front()};
  seen[static_cast<std::size_t>(verts.front())] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const SegmentId v = stack.back();
    stack.pop_back();
    for (SegmentId u : adjacency_[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(u)] != 0) continue;
      seen[static_cast<std::size_t>(u)] = 1;
      ++reached;
      stack.push_back(u);
    }
  }
  return reached == verts.size();
}

AdjacencyGraph build_graph(const SegmentMap& segmap, Connectivity connectivity) {
  std::vector<Edge> edges;
  const int w = segmap.width();
  const int h = segmap.height();
  auto link = [&](SegmentId a, SegmentId b) {
    if (a == b) return;
    edges.push_back(a < b ? Edge{a, b} : Edge{b, a});
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const SegmentId l = segmap.at(x, y);
      if (x + 1 < w) link(l, segmap.at(x + 1, y));
      if (y + 1 < h) link(l, segmap.at(x, y + 1));
      if (connectivity == Connectivity::eight && y + 1 < h) {
        if (x + 1 < w) link(l, segmap.at(x + 1, y + 1));
        if (x > 0) link(l, segmap.at(x - 1, y + 1));
      }
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return AdjacencyGraph(segmap.segment_count(), edges);
}

void write_edge_list(std::ostream& out, const AdjacencyGraph& g) {
  for (const Edge& e : g.edges()) out << e.first << ' ' << e.second << '\n';
}

}  // namespace mindful
