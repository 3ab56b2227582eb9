#include "mindful/mindful_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mindful {

bool SampleRecord::path_contains(SegmentId a, SegmentId b) const {
  return std::any_of(path.begin(), path.end(), [a, b](const Edge& e) {
    return (e.first == a && e.second == b) || (e.first == b && e.second == a);
  });
}

void MindfulConfig::validate() const {
  if (max_level < 1) throw ContractViolation("mindful: max_level must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ContractViolation("mindful: threshold must lie in [0,1]");
}

bool decision_module(const Classifier& classifier, const ImageBuffer& sample_image,
                     const std::string& class_id, double threshold, double* probability) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ContractViolation("decision module: threshold must lie in [0,1]");
  if (!classifier.has_class(class_id))
    throw ContractViolation("decision module: unknown class '" + class_id + "'");
  const double p = classifier.predict(sample_image).at(class_id);
  if (probability != nullptr) *probability = p;
  return p > threshold;
}

DecisionFunction make_decision_function(const MaskRenderer& renderer, const Classifier& classifier,
                                        const std::string& class_id, double threshold) {
  if (!classifier.has_class(class_id))
    throw ContractViolation("mindful: unknown class '" + class_id + "'");
  return [&renderer, &classifier, class_id, threshold](const MaskVector& mask) {
    Decision d;
    d.accepted = decision_module(classifier, renderer.render(mask), class_id, threshold,
                                 &d.probability);
    return d;
  };
}

// ---------------------------------------------------------------------------
// Phase 1

Phase1Result generate_phase1(const AdjacencyGraph& graph, std::size_t segment_count,
                             const DecisionFunction& decide) {
  if (static_cast<std::size_t>(graph.capacity()) > segment_count)
    throw ContractViolation("mindful: graph has more vertices than the mask length");
  Phase1Result result{{}, graph};
  for (SegmentId v : graph.vertices()) {
    MaskVector mask = MaskVector::all_ones(segment_count);
    mask.set(static_cast<std::size_t>(v), false);
    const Decision d = decide(mask);
    if (d.accepted) {
      SampleRecord rec;
      rec.path.push_back({v, v});
      rec.value = std::move(mask);
      rec.processed = false;
      rec.probability = d.probability;
      result.table.push_back(std::move(rec));
    } else {
      result.pruned.remove_vertex(v);
    }
  }
  return result;
}

Phase1Result generate_phase1(const AdjacencyGraph& graph, const ImageBuffer& image,
                             const SegmentMap& segmap, const std::string& class_id,
                             const Classifier& classifier, const MindfulConfig& cfg) {
  cfg.validate();
  const MaskRenderer renderer(image, segmap);
  return generate_phase1(graph, static_cast<std::size_t>(segmap.segment_count()),
                         make_decision_function(renderer, classifier, class_id, cfg.threshold));
}

// ---------------------------------------------------------------------------
// Phase 2

void generate_phase2(SampleTable& table, const AdjacencyGraph& pruned, const MindfulConfig& cfg,
                     const DecisionFunction& decide) {
  cfg.validate();
  const auto max_depth = static_cast<std::size_t>(cfg.max_level);
  // Index-based: the table grows while it is walked.
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].processed) continue;
    const SegmentId v = table[i].frontier();
    if (table[i].path.size() < max_depth && pruned.contains(v)) {
      for (const Edge& e : pruned.incident_edges(v)) {
        if (table[i].path_contains(e.first, e.second)) continue;
        MaskVector mask = table[i].value;
        mask.set(static_cast<std::size_t>(e.first), false);
        mask.set(static_cast<std::size_t>(e.second), false);
        const Decision d = decide(mask);
        if (!d.accepted) continue;
        SampleRecord child;
        child.path = table[i].path;
        // Stored as (frontier, newly deactivated) so the next frontier moves on.
        child.path.push_back(e);
        child.value = std::move(mask);
        child.processed = false;
        child.probability = d.probability;
        table.push_back(std::move(child));
      }
    }
    table[i].processed = true;
  }
}

SampleTable generate_phase2(SampleTable table, const AdjacencyGraph& pruned,
                            const ImageBuffer& image, const SegmentMap& segmap,
                            const std::string& class_id, const Classifier& classifier,
                            const MindfulConfig& cfg) {
  const MaskRenderer renderer(image, segmap);
  generate_phase2(table, pruned, cfg,
                  make_decision_function(renderer, classifier, class_id, cfg.threshold));
  return table;
}

SampleTable generate(const AdjacencyGraph& graph, std::size_t segment_count,
                     const MindfulConfig& cfg, const DecisionFunction& decide) {
  cfg.validate();
  Phase1Result p1 = generate_phase1(graph, segment_count, decide);
  generate_phase2(p1.table, p1.pruned, cfg, decide);
  return std::move(p1.table);
}

SampleTable generate(const ImageBuffer& image, const SegmentMap& segmap,
                     const std::string& class_id, const Classifier& classifier,
                     const MindfulConfig& cfg) {
  cfg.validate();
  const MaskRenderer renderer(image, segmap);
  return generate(build_graph(segmap), static_cast<std::size_t>(segmap.segment_count()), cfg,
                  make_decision_function(renderer, classifier, class_id, cfg.threshold));
}

double sample_count_bound(std::size_t vertices, std::size_t max_degree, int max_level) {
  double sum = 0.0;
  double term = 1.0;
  for (int j = 0; j < max_level; ++j) {
    sum += term;
    term *= static_cast<double>(max_degree);
  }
  return static_cast<double>(vertices) * sum;
}

SampleTable dedupe_by_mask(const SampleTable& table) {
  SampleTable out;
  std::map<MaskVector, bool> seen;
  for (const auto& rec : table)
    if (seen.emplace(rec.value, true).second) out.push_back(rec);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

std::string sample_record_to_json(const SampleRecord& record) {
  nlohmann::ordered_json j;
  j["path"] = nlohmann::ordered_json::array();
  for (const Edge& e : record.path) j["path"].push_back({e.first, e.second});
  j["mask"] = nlohmann::ordered_json::array();
  for (auto b : record.value.bits()) j["mask"].push_back(static_cast<int>(b));
  j["processed"] = record.processed;
  return j.dump();
}

void write_sample_table(std::ostream& out, const SampleTable& table) {
  for (const auto& rec : table) out << sample_record_to_json(rec) << '\n';
}

std::string serialize_sample_table(const SampleTable& table) {
  std::ostringstream out;
  write_sample_table(out, table);
  return out.str();
}

SampleTable read_sample_table(std::istream& in) {
  SampleTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SampleRecord rec;
      if (j.contains("path"))
        for (const auto& e : j.at("path")) rec.path.push_back({e.at(0).get<SegmentId>(), e.at(1).get<SegmentId>()});
      rec.value = MaskVector(j.at("mask").get<std::vector<std::uint8_t>>());
      rec.processed = j.value("processed", false);
      table.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("sample table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

}  // namespace mindful
