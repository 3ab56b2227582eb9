#pragma once

// Graph-guided purposive sample generation.
//
// Phase 1 deactivates each superpixel on its own and keeps the masks the
// decision module accepts; rejected superpixels are pruned from the graph.
// Phase 2 walks the table in insertion order and grows every unprocessed
// sample along the pruned graph from its frontier vertex (the second vertex
// of the last path edge), one adjacent superpixel per child, keeping each
// child the decision module accepts. Generation is a pure function of its
// inputs: there is no randomness anywhere.

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mindful/classifier.hpp"
#include "mindful/graph.hpp"

namespace mindful {

struct SampleRecord {
  std::vector<Edge> path;  // first entry is the self-pair (v, v)
  MaskVector value;
  bool processed = false;
  // Classifier probability for the target class, cached from the decision
  // query. Not part of the persisted form.
  double probability = 0.0;

  // Second vertex of the last path edge.
  SegmentId frontier() const { return path.back().second; }
  bool path_contains(SegmentId a, SegmentId b) const;
};

using SampleTable = std::vector<SampleRecord>;

struct MindfulConfig {
  // Maximum sample depth: the number of path entries (the self-pair counts
  // as one), hence also an upper bound on deactivated superpixels.
  int max_level = 2;
  double threshold = 0.5;
  // Collapse identical masks reached through different paths before fitting.
  bool dedupe_masks = false;

  void validate() const;
};

struct Decision {
  bool accepted = false;
  double probability = 0.0;
};

// Maps a candidate mask to an accept/reject decision.
using DecisionFunction = std::function<Decision(const MaskVector&)>;

// probability(class_id) > threshold, strictly.
bool decision_module(const Classifier& classifier, const ImageBuffer& sample_image,
                     const std::string& class_id, double threshold,
                     double* probability = nullptr);

// Builds a DecisionFunction that renders masks over `image` and queries
// `classifier`. The renderer and classifier must outlive the function.
DecisionFunction make_decision_function(const MaskRenderer& renderer, const Classifier& classifier,
                                        const std::string& class_id, double threshold);

struct Phase1Result {
  SampleTable table;
  AdjacencyGraph pruned;
};

Phase1Result generate_phase1(const AdjacencyGraph& graph, std::size_t segment_count,
                             const DecisionFunction& decide);
Phase1Result generate_phase1(const AdjacencyGraph& graph, const ImageBuffer& image,
                             const SegmentMap& segmap, const std::string& class_id,
                             const Classifier& classifier, const MindfulConfig& cfg);

// Expands `table` in place until every record is processed.
void generate_phase2(SampleTable& table, const AdjacencyGraph& pruned, const MindfulConfig& cfg,
                     const DecisionFunction& decide);
SampleTable generate_phase2(SampleTable table, const AdjacencyGraph& pruned,
                            const ImageBuffer& image, const SegmentMap& segmap,
                            const std::string& class_id, const Classifier& classifier,
                            const MindfulConfig& cfg);

SampleTable generate(const AdjacencyGraph& graph, std::size_t segment_count,
                     const MindfulConfig& cfg, const DecisionFunction& decide);
SampleTable generate(const ImageBuffer& image, const SegmentMap& segmap,
                     const std::string& class_id, const Classifier& classifier,
                     const MindfulConfig& cfg);

// d * (1 + k + ... + k^(L-1)) for d vertices, max degree k, depth L.
double sample_count_bound(std::size_t vertices, std::size_t max_degree, int max_level);

// Unique masks in first-occurrence order, with their cached probabilities.
SampleTable dedupe_by_mask(const SampleTable& table);

// JSON lines: {"path":[[v,v],...],"mask":[...],"processed":bool}
std::string sample_record_to_json(const SampleRecord& record);
void write_sample_table(std::ostream& out, const SampleTable& table);
std::string serialize_sample_table(const SampleTable& table);
SampleTable read_sample_table(std::istream& in);

}  // namespace mindful
