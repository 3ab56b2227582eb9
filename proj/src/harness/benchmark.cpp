#include "mindful/harness/benchmark.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "mindful/csv.hpp"
#include "mindful/harness/io.hpp"
#include "mindful/harness/svg.hpp"
#include "mindful/metrics.hpp"

namespace mindful::harness {

namespace fs = std::filesystem;

MethodVersion MethodVersion::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  MethodVersion v;
  v.method = parse_method(name);
  if (colon == std::string::npos) return v;
  const std::string arg = text.substr(colon + 1);
  long long n = 0;
  try {
    std::size_t used = 0;
    n = std::stoll(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw ContractViolation("method version '" + text + "': expected an integer after ':'");
  }
  if (n < 1) throw ContractViolation("method version '" + text + "': value must be >= 1");
  if (v.method == SamplerMethod::mindful)
    v.levels = static_cast<int>(n);
  else
    v.samples = static_cast<std::size_t>(n);
  return v;
}

std::string MethodVersion::version() const {
  return method == SamplerMethod::mindful ? "levels-" + std::to_string(levels)
                                          : "samples-" + std::to_string(samples);
}

std::string to_string(MaskMode m) { return m == MaskMode::raw ? "raw" : "bbox"; }

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "raw") return MaskMode::raw;
  if (s == "bbox") return MaskMode::bbox;
  throw ContractViolation("unknown mask mode '" + s + "' (raw or bbox)");
}

void BenchmarkConfig::validate() const {
  if (segmenters.empty()) throw ContractViolation("benchmark: no segmenters");
  if (versions.empty()) throw ContractViolation("benchmark: no methods");
  if (top_k.empty()) throw ContractViolation("benchmark: no top_k values");
  for (auto k : top_k)
    if (k < 1) throw ContractViolation("benchmark: top_k entries must be >= 1");
  if (runs < 1) throw ContractViolation("benchmark: runs must be >= 1");
  for (const auto& s : segmenters) s.validate();
  surrogate.validate();
  if (threshold_override && !(*threshold_override >= 0 && *threshold_override <= 1))
    throw ContractViolation("benchmark: threshold must lie in [0,1]");
}

const std::vector<std::string> kBenchmarkHeader = {
    "segmenter",          "algorithm",          "version",      "top_k",
    "instances",          "runs",               "avg_superpixels", "avg_runtime_seconds",
    "avg_samples",        "stability_pairwise", "mean_gt_iou",  "mean_localization_precision"};

const std::vector<std::string> kStabilityHeader = {
    "segmenter", "algorithm",   "version",     "top_k",   "image_id",        "class_id",
    "runs",      "stability_pairwise", "mean_gt_iou", "localization_precision", "superpixels",
    "avg_samples", "avg_runtime_seconds", "empty_runs"};

const std::vector<std::string> kErrorsHeader = {"segmenter", "algorithm", "version", "top_k",
                                                "classifier_failure", "error"};

namespace {

struct Instance {
  const CorpusImage* image;
  std::string class_id;
  BinaryPixelMask gt;
};

struct RunOutput {
  ExplanationResult result;
  double runtime = 0.0;
};

void add_warning(BenchmarkReport& report, std::set<std::string>& seen, const std::string& w) {
  if (seen.insert(w).second) report.warnings.push_back(w);
}

BinaryPixelMask mode_mask(const BinaryPixelMask& m, MaskMode mode) {
  return mode == MaskMode::raw ? m : to_bbox_mask(m);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

BenchmarkReport run_benchmark(const Corpus& corpus, const Classifier& classifier,
                              const BenchmarkConfig& cfg) {
  cfg.validate();
  BenchmarkReport report;
  report.cell_count = cfg.cell_count();
  std::set<std::string> seen;

  std::vector<Instance> instances;
  for (const auto& img : corpus.images)
    for (const auto& cls : corpus.labels_of(img.id)) {
      if (!classifier.has_class(cls)) {
        add_warning(report, seen, "classifier has no class '" + cls + "'; instances skipped");
        continue;
      }
      instances.push_back({&img, cls,
                           boxes_to_pixel_mask(corpus.annotations, img.id, cls, img.image.width(),
                                               img.image.height())});
    }

  const ThresholdSource thresholds{cfg.thresholds ? &*cfg.thresholds : nullptr, cfg.threshold_override};
  const std::size_t max_k = *std::max_element(cfg.top_k.begin(), cfg.top_k.end());

  for (const auto& seg_cfg : cfg.segmenters) {
    const std::string seg_name = to_string(seg_cfg.algorithm);
    auto fail_all = [&](const MethodVersion& v, const std::string& msg, bool clf) {
      for (auto k : cfg.top_k) report.errors.push_back({seg_name, v.algorithm(), v.version(), k, msg, clf});
    };

    std::vector<SegmentMap> segmaps;
    std::string seg_error;
    try {
      if (instances.empty()) throw ContractViolation("corpus has no annotated instances");
      Warnings w;
      for (const auto& img : corpus.images) segmaps.push_back(segment(img.image, seg_cfg, &w));
      for (const auto& m : w) add_warning(report, seen, m);
    } catch (const std::exception& e) {
      seg_error = e.what();
    }
    auto segmap_of = [&](const CorpusImage* img) -> const SegmentMap& {
      return segmaps[static_cast<std::size_t>(img - corpus.images.data())];
    };

    for (const auto& version : cfg.versions) {
      if (!seg_error.empty()) {
        fail_all(version, seg_error, false);
        continue;
      }
      try {
        // runs_by_instance[i][r]
        std::vector<std::vector<RunOutput>> runs(instances.size());
        for (std::size_t i = 0; i < instances.size(); ++i) {
          const Instance& inst = instances[i];
          Warnings w;
          ExplainOptions opt;
          opt.method = version.method;
          opt.mindful.max_level = version.levels;
          opt.mindful.dedupe_masks = cfg.dedupe_masks;
          opt.random.num_samples = version.samples;
          opt.random.bernoulli_p = cfg.bernoulli_p;
          opt.surrogate = cfg.surrogate;
          opt.top_k = max_k;
          if (version.method == SamplerMethod::mindful)
            opt.mindful.threshold = thresholds.resolve(inst.class_id, &w);
          for (const auto& m : w) add_warning(report, seen, m);
          for (int r = 0; r < cfg.runs; ++r) {
            opt.random.rng_seed = cfg.base_seed + static_cast<std::uint64_t>(r);
            ClassExplanation e = explain_class(inst.image->image, segmap_of(inst.image), inst.class_id,
                                               classifier, opt);
            runs[i].push_back({std::move(e.result), 0.0});
            runs[i].back().runtime = runs[i].back().result.runtime_seconds;
          }
        }

        for (auto k : cfg.top_k) {
          BenchmarkRow row;
          row.segmenter = seg_name;
          row.algorithm = version.algorithm();
          row.version = version.version();
          row.top_k = k;
          row.instances = instances.size();
          row.runs = static_cast<std::size_t>(cfg.runs);
          std::vector<double> sp, rt, ns, st, gi, lp;
          for (std::size_t i = 0; i < instances.size(); ++i) {
            const Instance& inst = instances[i];
            const SegmentMap& segmap = segmap_of(inst.image);
            std::vector<BinaryPixelMask> masks;
            std::vector<double> prec, samples, times;
            std::size_t empty = 0;
            for (const auto& run : runs[i]) {
              ExplanationResult r = run.result;
              select_top_k(r, segmap, k);
              masks.push_back(mode_mask(r.explanation_pixel_mask, cfg.mask_mode));
              if (masks.back().count() == 0) ++empty;
              prec.push_back(localization_precision(inst.gt, masks.back()));
              samples.push_back(static_cast<double>(r.sample_count_used));
              times.push_back(run.runtime);
            }
            InstanceResult ir;
            ir.segmenter = seg_name;
            ir.algorithm = row.algorithm;
            ir.version = row.version;
            ir.top_k = k;
            ir.image_id = inst.image->id;
            ir.class_id = inst.class_id;
            ir.runs = masks.size();
            ir.stability_pairwise = masks.size() >= 2 ? stability_score(masks).stability : 1.0;
            ir.mean_gt_iou = mean_gt_iou(masks, inst.gt);
            ir.localization_precision = mean(prec);
            ir.superpixels = static_cast<std::size_t>(segmap.segment_count());
            ir.samples = mean(samples);
            ir.runtime_seconds = mean(times);
            ir.empty_runs = empty;
            if (empty > 0)
              add_warning(report, seen, "empty explanations scored 0 (" + seg_name + ", " + row.version + ")");
            sp.push_back(static_cast<double>(ir.superpixels));
            rt.push_back(ir.runtime_seconds);
            ns.push_back(ir.samples);
            st.push_back(ir.stability_pairwise);
            gi.push_back(ir.mean_gt_iou);
            lp.push_back(ir.localization_precision);
            report.instances.push_back(std::move(ir));
          }
          row.avg_superpixels = mean(sp);
          row.avg_runtime_seconds = mean(rt);
          row.avg_samples = mean(ns);
          row.stability_pairwise = mean(st);
          row.mean_gt_iou = mean(gi);
          row.mean_localization_precision = mean(lp);
          report.rows.push_back(row);
        }
      } catch (const ClassifierError& e) {
        fail_all(version, e.what(), true);
      } catch (const std::exception& e) {
        fail_all(version, e.what(), false);
      }
    }
  }
  if (cfg.runs == 1) add_warning(report, seen, "single run: stability reported as 1");
  return report;
}

namespace {

std::string to_csv(const std::vector<std::string>& header, const std::vector<csv::Row>& rows) {
  std::ostringstream out;
  csv::write_row(out, header);
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

std::string num(double v) { return csv::number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string cell_label(const BenchmarkRow& r) {
  return r.segmenter + "/" + r.algorithm + "/" + r.version + "/top" + std::to_string(r.top_k);
}

}  // namespace

std::string benchmark_csv(const BenchmarkReport& report) {
  std::vector<csv::Row> rows;
  for (const auto& r : report.rows)
    rows.push_back({r.segmenter, r.algorithm, r.version, num(r.top_k), num(r.instances), num(r.runs),
                    num(r.avg_superpixels), num(r.avg_runtime_seconds), num(r.avg_samples),
                    num(r.stability_pairwise), num(r.mean_gt_iou), num(r.mean_localization_precision)});
  return to_csv(kBenchmarkHeader, rows);
}

std::string stability_csv(const BenchmarkReport& report) {
  std::vector<csv::Row> rows;
  for (const auto& r : report.instances)
    rows.push_back({r.segmenter, r.algorithm, r.version, num(r.top_k), r.image_id, r.class_id, num(r.runs),
                    num(r.stability_pairwise), num(r.mean_gt_iou), num(r.localization_precision),
                    num(r.superpixels), num(r.samples), num(r.runtime_seconds), num(r.empty_runs)});
  return to_csv(kStabilityHeader, rows);
}

std::string errors_csv(const BenchmarkReport& report) {
  std::vector<csv::Row> rows;
  for (const auto& e : report.errors)
    rows.push_back({e.segmenter, e.algorithm, e.version, num(e.top_k), e.classifier_failure ? "1" : "0",
                    e.message});
  return to_csv(kErrorsHeader, rows);
}

void write_benchmark(const BenchmarkReport& report, const std::string& dir) {
  const fs::path root(dir);
  atomic_write((root / "benchmark.csv").string(), benchmark_csv(report));
  atomic_write((root / "stability.csv").string(), stability_csv(report));
  atomic_write((root / "errors.csv").string(), errors_csv(report));

  std::vector<Bar> stability, precision, runtime;
  for (const auto& r : report.rows) {
    stability.push_back({cell_label(r), r.stability_pairwise});
    precision.push_back({cell_label(r), r.mean_localization_precision});
    char sp[32];
    std::snprintf(sp, sizeof sp, "%.1f", r.avg_superpixels);
    runtime.push_back({cell_label(r) + " (" + sp + " sp)", r.avg_runtime_seconds});
  }
  atomic_write((root / "stability.svg").string(),
               bar_chart_svg("Pairwise stability by method", "stability (mean pairwise IOU)", stability, 1.0));
  atomic_write((root / "precision.svg").string(),
               bar_chart_svg("Localization precision by method", "mean 1 - JS divergence", precision, 1.0));
  atomic_write((root / "runtime.svg").string(),
               bar_chart_svg("Runtime vs superpixel count", "seconds per explanation", runtime));

  nlohmann::ordered_json j;
  j["cells"] = report.cell_count;
  j["succeeded"] = report.rows.size();
  j["failed"] = report.errors.size();
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json o;
    o["segmenter"] = r.segmenter;
    o["algorithm"] = r.algorithm;
    o["version"] = r.version;
    o["top_k"] = r.top_k;
    o["instances"] = r.instances;
    o["avg_superpixels"] = r.avg_superpixels;
    o["avg_runtime_seconds"] = r.avg_runtime_seconds;
    o["avg_samples"] = r.avg_samples;
    o["stability_pairwise"] = r.stability_pairwise;
    o["mean_gt_iou"] = r.mean_gt_iou;
    o["mean_localization_precision"] = r.mean_localization_precision;
    j["rows"].push_back(o);
  }
  j["warnings"] = report.warnings;
  atomic_write((root / "summary.json").string(), j.dump(2) + "\n");
}

}  // namespace mindful::harness
