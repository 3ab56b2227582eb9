#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mindful/core.hpp"

namespace mindful {

// Undirected edge stored as (first, second). Graph-level edge lists are
// normalized with first < second; incident_edges() orients them as
// (queried vertex, neighbour).
struct Edge {
  SegmentId first = 0;
  SegmentId second = 0;

  auto operator<=>(const Edge&) const = default;
};

enum class Connectivity { four, eight };

// Region adjacency graph over superpixel ids [0, capacity). Vertices may be
// removed; iteration is always in ascending id order.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;
  // Graph with vertices 0..n-1 and the given edges. Self-loops and
  // out-of-range endpoints throw; duplicates are collapsed.
  AdjacencyGraph(int vertex_count, std::span<const Edge> edges);

  int capacity() const noexcept { return static_cast<int>(present_.size()); }
  bool contains(SegmentId v) const noexcept {
    return v >= 0 && v < capacity() && present_[static_cast<std::size_t>(v)] != 0;
  }
  std::vector<SegmentId> vertices() const;
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::vector<Edge> edges() const;
  std::size_t edge_count() const noexcept;

  // Sorted neighbour ids of a present vertex.
  std::span<const SegmentId> neighbours(SegmentId v) const;
  std::size_t degree(SegmentId v) const { return neighbours(v).size(); }
  std::size_t max_degree() const noexcept;

  // Edges containing v as (v, other), ascending by other.
  std::vector<Edge> incident_edges(SegmentId v) const;

  // Removes v and its incident edges in place. Throws if v is absent.
  void remove_vertex(SegmentId v);
  AdjacencyGraph without_vertex(SegmentId v) const {
    AdjacencyGraph g = *this;
    g.remove_vertex(v);
    return g;
  }

  bool connected() const;
  bool operator==(const AdjacencyGraph&) const = default;

 private:
  void require(SegmentId v) const;

  std::vector<std::uint8_t> present_;
  std::vector<std::vector<SegmentId>> adjacency_;
  std::size_t vertex_count_ = 0;
};

// Vertices are all labels; a and b are joined iff some pixel of a touches a
// pixel of b (4-connectivity by default).
AdjacencyGraph build_graph(const SegmentMap& segmap,
                           Connectivity connectivity = Connectivity::four);

// Debug dump: one "a b" line per edge, sorted.
void write_edge_list(std::ostream& out, const AdjacencyGraph& g);

}  // namespace mindful
