#include "mindful/harness/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mindful/csv.hpp"
#include "mindful/explainer.hpp"
#include "mindful/harness/benchmark.hpp"
#include "mindful/harness/corpus.hpp"
#include "mindful/harness/evaluate.hpp"
#include "mindful/harness/io.hpp"
#include "mindful/harness/overlay.hpp"
#include "mindful/image_io.hpp"
#include "mindful/remote_classifier.hpp"
#include "mindful/segmentation.hpp"

namespace mindful::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kUrlEnv = "MINDFUL_CLASSIFIER_URL";

// Thrown for bad flags or config values; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void print_warnings(std::ostream& err, const Warnings& w) {
  for (const auto& m : w) err << "warning: " << m << '\n';
}

// ---------------------------------------------------------------------------
// JSON config files. Keys are long flag names without the leading dashes;
// a flag given on the command line wins over its key.

std::vector<std::string> json_to_results(const nlohmann::json& v) {
  std::vector<std::string> out;
  auto scalar = [](const nlohmann::json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    if (x.is_number_unsigned()) return std::to_string(x.get<unsigned long long>());
    if (x.is_number()) return csv::number(x.get<double>());
    throw ConfigError("config: unsupported value " + x.dump());
  };
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(scalar(x));
  } else {
    out.push_back(scalar(v));
  }
  return out;
}

void apply_config(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config " + path + ": expected a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw ConfigError("config " + path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(json_to_results(value));
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config " + path + ": key '" + key + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Shared option groups

struct SegmenterOptions {
  std::string algorithm = "slic";
  SlicParams slic;
  FelzenszwalbParams felz;
  std::string segments_path;

  void add(CLI::App& app) {
    app.add_option("--segmenter", algorithm, "slic, felzenszwalb or precomputed");
    app.add_option("--n-segments", slic.n_segments, "SLIC target segment count");
    app.add_option("--compactness", slic.compactness, "SLIC compactness");
    app.add_option("--slic-sigma", slic.sigma, "SLIC pre-blur sigma");
    app.add_option("--scale", felz.scale, "Felzenszwalb scale");
    app.add_option("--min-size", felz.min_size, "Felzenszwalb minimum segment size");
    app.add_option("--felzenszwalb-sigma", felz.sigma, "Felzenszwalb pre-blur sigma");
    app.add_option("--segments", segments_path, "precomputed segment map file");
  }

  SegmenterConfig config(const std::string& name) const {
    SegmenterConfig c;
    c.algorithm = parse_segmenter(name);
    c.slic = slic;
    c.felzenszwalb = felz;
    c.precomputed_path = segments_path;
    c.validate();
    return c;
  }
};

struct ClassifierOptions {
  std::string spec;
  std::string config_path;
  int timeout = 30;
  int in_flight = 4;

  void add(CLI::App& app) {
    app.add_option("--classifier", spec, "builtin:patch, builtin:linear, remote or remote:URL");
    app.add_option("--classifier-config", config_path, "JSON classifier parameters");
    app.add_option("--timeout", timeout, "remote request timeout in seconds");
    app.add_option("--max-in-flight", in_flight, "remote batch concurrency");
  }

  // corpus_config: classifier.json shipped with a corpus, used when nothing
  // else is specified.
  std::unique_ptr<Classifier> make(int width, int height, const SegmentMap* fallback,
                                   const std::string& corpus_config = {}) const {
    std::string kind = spec;
    std::string url;
    const char* env = std::getenv(kUrlEnv);
    const std::string env_url = env != nullptr ? env : "";
    if (kind.empty()) {
      if (!config_path.empty())
        kind = "config";
      else if (!env_url.empty())
        kind = "remote";
      else if (!corpus_config.empty() && fs::exists(corpus_config))
        kind = "corpus";
      else
        kind = "builtin:patch";
    }
    auto load_json = [](const std::string& path) {
      try {
        return nlohmann::json::parse(read_text(path));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("classifier config " + path + ": " + e.what());
      } catch (const FormatError& e) {
        throw ConfigError(e.what());
      }
    };
    auto from_config = [&](const std::string& path) -> std::unique_ptr<Classifier> {
      try {
        return classifier_from_json(load_json(path), fallback);
      } catch (const FormatError& e) {
        throw ConfigError(e.what());
      }
    };
    if (kind == "config") return from_config(config_path);
    if (kind == "corpus") return from_config(corpus_config);
    if (kind == "builtin:patch") {
      if (!config_path.empty()) return from_config(config_path);
      if (width <= 0 || height <= 0) throw ConfigError("builtin:patch needs an image size or --classifier-config");
      // One class looking at the central half of the image.
      return std::make_unique<PatchClassifier>(
          std::vector<PatchClassifier::ClassSpec>{
              {"patch", Box{width / 4, height / 4, width - width / 4, height - height / 4}, 10.0, -5.0}},
          width, height);
    }
    if (kind == "builtin:linear") {
      if (config_path.empty()) throw ConfigError("builtin:linear requires --classifier-config");
      return from_config(config_path);
    }
    if (kind == "remote" || kind.rfind("remote:", 0) == 0) {
      url = kind.size() > 7 ? kind.substr(7) : env_url;
      if (url.empty()) throw ConfigError(std::string("remote classifier needs a URL or ") + kUrlEnv);
      RemoteClassifierOptions o;
      o.url = url;
      o.timeout_seconds = timeout;
      o.max_in_flight = in_flight;
      return std::make_unique<RemoteClassifier>(o);
    }
    throw ConfigError("unknown classifier '" + spec + "'");
  }
};

struct SurrogateOptions {
  SurrogateConfig cfg;
  void add(CLI::App& app) {
    app.add_option("--kernel-width", cfg.kernel_width, "proximity kernel width");
    app.add_option("--ridge-lambda", cfg.ridge_lambda, "ridge penalty");
  }
};

std::optional<ThresholdTable> load_thresholds(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return ThresholdTable::load(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("thresholds: ") + e.what());
  }
}

void write_png_atomic(const fs::path& path, const ImageBuffer& img) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  save_png(tmp.string(), img);
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// explain

struct ExplainArgs {
  std::string config;
  std::string image;
  std::string image_id;
  std::string method = "mindful";
  int levels = 2;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double bernoulli_p = 0.5;
  std::size_t top_k = 4;
  std::size_t k_classes = 3;
  std::vector<std::string> classes;
  std::string thresholds;
  std::optional<double> threshold;
  bool dedupe = false;
  std::string out = ".";
  bool overlay = false;
  bool save_samples = false;
  std::string annotations;
  SegmenterOptions seg;
  ClassifierOptions clf;
  SurrogateOptions sur;
};

std::string samples_jsonl(const std::vector<MaskVector>& masks) {
  std::ostringstream out;
  for (const auto& m : masks) {
    nlohmann::ordered_json j;
    j["mask"] = std::vector<int>(m.bits().begin(), m.bits().end());
    out << j.dump() << '\n';
  }
  return out.str();
}

int cmd_explain(const ExplainArgs& a, std::ostream& out, std::ostream& err) {
  if (a.image.empty()) throw ConfigError("explain: --image is required");
  if (!fs::exists(a.image)) throw ConfigError("explain: image not found: " + a.image);
  ImageBuffer image;
  try {
    image = load_png(a.image);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  Warnings warnings;
  const SegmenterConfig seg_cfg = a.seg.config(a.seg.algorithm);
  const SegmentMap segmap = segment(image, seg_cfg, &warnings);
  const auto classifier = a.clf.make(image.width(), image.height(), &segmap);
  const auto table = load_thresholds(a.thresholds);

  ExplainOptions opt;
  opt.method = parse_method(a.method);
  opt.mindful.max_level = a.levels;
  opt.mindful.dedupe_masks = a.dedupe;
  opt.random.num_samples = a.samples;
  opt.random.rng_seed = a.seed;
  opt.random.bernoulli_p = a.bernoulli_p;
  opt.surrogate = a.sur.cfg;
  opt.top_k = a.top_k;
  opt.mindful.validate();
  opt.random.validate();
  opt.surrogate.validate();
  if (a.top_k < 1) throw ConfigError("explain: --top-k must be >= 1");
  if (a.threshold && !(*a.threshold >= 0 && *a.threshold <= 1))
    throw ConfigError("explain: --threshold must lie in [0,1]");
  const ThresholdSource thresholds{table ? &*table : nullptr, a.threshold};

  std::vector<ClassExplanation> results;
  if (!a.classes.empty()) {
    for (const auto& c : a.classes) {
      if (!classifier->has_class(c)) throw ConfigError("explain: classifier has no class '" + c + "'");
      ExplainOptions per = opt;
      per.mindful.threshold = thresholds.resolve(c, &warnings);
      results.push_back(explain_class(image, segmap, c, *classifier, per));
      results.back().threshold = per.mindful.threshold;
    }
  } else {
    if (a.k_classes < 1) throw ConfigError("explain: --classes must be >= 1");
    results = explain_top_classes(image, segmap, *classifier, a.k_classes, opt, thresholds, &warnings);
  }

  const std::string stem = fs::path(a.image).stem().string();
  ExplanationFile file;
  file.image_id = a.image_id.empty() ? stem : a.image_id;
  file.width = image.width();
  file.height = image.height();
  file.segmenter = to_string(seg_cfg.algorithm);
  file.method = to_string(opt.method);
  file.segment_count = static_cast<std::size_t>(segmap.segment_count());
  file.explanations = results;

  const fs::path dir(a.out);
  const fs::path json_path = dir / (stem + ".explanation.json");
  atomic_write(json_path.string(), explanation_file_to_json(file).dump(2) + "\n");

  AnnotationSet ann;
  if (!a.annotations.empty()) {
    try {
      ann = load_annotations(a.annotations);
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& e : results) {
    const std::string cls = safe_file_component(e.result.class_id);
    if (a.save_samples && opt.method == SamplerMethod::mindful)
      atomic_write((dir / (stem + "." + cls + ".samples.jsonl")).string(), serialize_sample_table(e.table));
    if (a.overlay) {
      const auto boxes = ann.boxes_for(file.image_id, e.result.class_id);
      write_png_atomic(dir / (stem + "." + cls + ".overlay.png"),
                       render_overlay(image, segmap, e.result.selected_top_k, boxes));
    }
    out << file.image_id << '\t' << e.result.class_id << "\tp=" << csv::number(e.base_probability)
        << "\tsamples=" << e.result.sample_count_used << "\tselected=";
    for (std::size_t i = 0; i < e.result.selected_top_k.size(); ++i)
      out << (i ? "," : "") << e.result.selected_top_k[i];
    out << '\n';
    for (const auto& w : e.result.warnings) warnings.push_back(e.result.class_id + ": " + w);
  }
  if (a.save_samples && opt.method == SamplerMethod::random_baseline)
    atomic_write((dir / (stem + ".samples.jsonl")).string(),
                 samples_jsonl(generate_random(static_cast<std::size_t>(segmap.segment_count()), opt.random)));
  print_warnings(err, warnings);
  out << "wrote " << json_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string config;
  std::string corpus;
  std::string images;
  std::string annotations;
  std::string out = "thresholds.json";
  ClassifierOptions clf;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  Corpus corpus;
  std::string corpus_classifier;
  try {
    if (!a.corpus.empty()) {
      const fs::path root(a.corpus);
      corpus_classifier = (root / "classifier.json").string();
      corpus = load_corpus(fs::is_directory(root / "calibration") ? (root / "calibration").string() : a.corpus);
    } else {
      if (a.images.empty()) throw ConfigError("calibrate: give --corpus or --images");
      Corpus c;
      std::vector<fs::path> files;
      if (!fs::is_directory(a.images)) throw ConfigError("calibrate: not a directory: " + a.images);
      for (const auto& e : fs::directory_iterator(a.images))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) c.images.push_back({f.stem().string(), load_png(f.string())});
      if (!a.annotations.empty()) c.annotations = load_annotations(a.annotations);
      corpus = std::move(c);
    }
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (corpus.images.empty()) throw ConfigError("calibrate: calibration corpus is empty");
  const auto& first = corpus.images.front().image;
  const auto classifier = a.clf.make(first.width(), first.height(), nullptr, corpus_classifier);
  Warnings warnings;
  const auto samples = calibration_samples(corpus);
  const ThresholdTable table = calibrate_thresholds(*classifier, samples, &warnings);
  atomic_write(a.out, table.to_json().dump(2) + "\n");
  for (const auto& [k, v] : table.values()) out << k << '\t' << csv::number(v) << '\n';
  print_warnings(err, warnings);
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
  std::string config;
  std::string corpus;
  std::string out = "benchmark-out";
  std::vector<std::string> segmenters = {"slic", "felzenszwalb"};
  std::vector<std::string> methods = {"mindful:2", "random:1000"};
  std::vector<std::size_t> top_k = {1, 4};
  int runs = 10;
  std::uint64_t seed = 0;
  double bernoulli_p = 0.5;
  std::string thresholds;
  std::optional<double> threshold;
  bool calibrate = false;
  bool dedupe = false;
  std::string mask_mode = "raw";
  SegmenterOptions seg;
  ClassifierOptions clf;
  SurrogateOptions sur;
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
  if (a.corpus.empty()) throw ConfigError("benchmark: --corpus is required");
  Corpus corpus;
  try {
    corpus = load_corpus(a.corpus);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (corpus.images.empty()) throw ConfigError("benchmark: corpus has no images");

  BenchmarkConfig cfg;
  for (const auto& s : a.segmenters) cfg.segmenters.push_back(a.seg.config(s));
  for (const auto& m : a.methods) cfg.versions.push_back(MethodVersion::parse(m));
  cfg.top_k = a.top_k;
  cfg.runs = a.runs;
  cfg.base_seed = a.seed;
  cfg.bernoulli_p = a.bernoulli_p;
  cfg.dedupe_masks = a.dedupe;
  cfg.surrogate = a.sur.cfg;
  cfg.mask_mode = parse_mask_mode(a.mask_mode);
  cfg.threshold_override = a.threshold;
  cfg.thresholds = load_thresholds(a.thresholds);
  cfg.validate();

  const auto& first = corpus.images.front().image;
  const std::string corpus_classifier = (fs::path(a.corpus) / "classifier.json").string();
  const auto classifier = a.clf.make(first.width(), first.height(), nullptr, corpus_classifier);

  Warnings warnings;
  if (a.calibrate && !cfg.thresholds && !cfg.threshold_override) {
    const fs::path cal = fs::path(a.corpus) / "calibration";
    Corpus cal_corpus;
    try {
      cal_corpus = load_corpus(fs::is_directory(cal) ? cal.string() : a.corpus);
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
    if (cal_corpus.images.empty()) throw ConfigError("benchmark: calibration corpus is empty");
    cfg.thresholds = calibrate_thresholds(*classifier, calibration_samples(cal_corpus), &warnings);
  }

  const BenchmarkReport report = run_benchmark(corpus, *classifier, cfg);
  write_benchmark(report, a.out);
  warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
  print_warnings(err, warnings);
  for (const auto& e : report.errors)
    err << "error: cell " << e.segmenter << '/' << e.algorithm << '/' << e.version << "/top" << e.top_k
        << ": " << e.message << '\n';
  out << "cells: " << report.cell_count << ", succeeded: " << report.rows.size()
      << ", failed: " << report.errors.size() << '\n';
  out << "wrote " << a.out << '\n';
  return report.rows.empty() ? kExitBenchmarkFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string config;
  std::string explanations;
  std::string annotations;
  std::string out = "evaluation.csv";
  std::string summary;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.explanations.empty()) throw ConfigError("evaluate: --explanations is required");
  if (a.annotations.empty()) throw ConfigError("evaluate: --annotations is required");
  std::vector<LoadedExplanation> loaded;
  AnnotationSet ann;
  try {
    loaded = fs::is_directory(a.explanations) ? load_explanation_dir(a.explanations)
                                              : load_explanation_file(a.explanations);
    ann = load_annotations(a.annotations);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  Warnings warnings;
  const auto rows = evaluate_explanations(loaded, ann, &warnings);
  atomic_write(a.out, evaluation_csv(rows));
  if (!a.summary.empty()) {
    nlohmann::ordered_json j;
    double raw = 0, bbox = 0, iou_raw = 0, iou_bbox = 0;
    std::size_t empty = 0;
    for (const auto& r : rows) {
      raw += r.precision_raw;
      bbox += r.precision_bbox;
      iou_raw += r.iou_raw;
      iou_bbox += r.iou_bbox;
      empty += r.empty_explanation ? 1 : 0;
    }
    const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
    j["rows"] = rows.size();
    j["empty_explanations"] = empty;
    j["mean_iou_raw"] = iou_raw / n;
    j["mean_localization_precision_raw"] = raw / n;
    j["mean_iou_bbox"] = iou_bbox / n;
    j["mean_localization_precision_bbox"] = bbox / n;
    j["warnings"] = warnings;
    atomic_write(a.summary, j.dump(2) + "\n");
  }
  print_warnings(err, warnings);
  out << "rows: " << rows.size() << '\n' << "wrote " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-corpus

struct CorpusArgs {
  std::string config;
  std::string out;
  CorpusSpec spec;
};

int cmd_gen_corpus(const CorpusArgs& a, std::ostream& out, std::ostream&) {
  if (a.out.empty()) throw ConfigError("gen-corpus: --out is required");
  const auto corpus = generate_corpus(a.spec);
  write_corpus(corpus, a.out);
  out << "images: " << corpus.main.images.size() << ", calibration: " << corpus.calibration.images.size()
      << ", boxes: " << corpus.main.annotations.entries.size() << '\n'
      << "wrote " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve-check

int cmd_serve_check(const std::string& url_arg, int timeout, std::ostream& out) {
  std::string url = url_arg;
  if (url.empty()) {
    const char* env = std::getenv(kUrlEnv);
    if (env != nullptr) url = env;
  }
  if (url.empty()) throw ConfigError(std::string("serve-check: give --url or set ") + kUrlEnv);
  const HealthStatus h = check_health(url, timeout);
  nlohmann::ordered_json j;
  j["status"] = h.status;
  j["classes"] = h.classes;
  out << j.dump() << '\n';
  return h.status == "ok" ? kExitOk : kExitClassifier;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-guided deterministic perturbation explanations for image classifiers", "mindful"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mindful 0.1.0");

  ExplainArgs ex;
  auto* explain = app.add_subcommand("explain", "explain the top classes of one image");
  explain->add_option("--config", ex.config, "JSON file of flag defaults");
  explain->add_option("--image", ex.image, "PNG image");
  explain->add_option("--image-id", ex.image_id, "id recorded in the output (default: file stem)");
  explain->add_option("--method", ex.method, "mindful or random-baseline");
  explain->add_option("--levels", ex.levels, "mindful maximum level");
  explain->add_option("--samples", ex.samples, "random-baseline sample count");
  explain->add_option("--seed", ex.seed, "random-baseline seed");
  explain->add_option("--bernoulli-p", ex.bernoulli_p, "random-baseline activation probability");
  explain->add_option("--top-k", ex.top_k, "superpixels per explanation");
  explain->add_option("--classes", ex.k_classes, "number of top predicted classes to explain");
  explain->add_option("--class", ex.classes, "explain this class (repeatable)");
  explain->add_option("--thresholds", ex.thresholds, "threshold table JSON");
  explain->add_option("--threshold", ex.threshold, "threshold for every class");
  explain->add_flag("--dedupe", ex.dedupe, "collapse identical masks before fitting");
  explain->add_option("--out", ex.out, "output directory");
  explain->add_flag("--overlay", ex.overlay, "write overlay PNGs");
  explain->add_flag("--save-samples", ex.save_samples, "write sample tables as JSON lines");
  explain->add_option("--annotations", ex.annotations, "annotation CSV for overlay boxes");
  ex.seg.add(*explain);
  ex.clf.add(*explain);
  ex.sur.add(*explain);

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "derive per-class thresholds");
  calibrate->add_option("--config", ca.config, "JSON file of flag defaults");
  calibrate->add_option("--corpus", ca.corpus, "corpus directory (its calibration split if present)");
  calibrate->add_option("--images", ca.images, "directory of PNG images");
  calibrate->add_option("--annotations", ca.annotations, "annotation CSV giving true labels");
  calibrate->add_option("--out", ca.out, "threshold table JSON to write");
  ca.clf.add(*calibrate);

  BenchmarkArgs be;
  auto* benchmark = app.add_subcommand("benchmark", "run the segmenter x method grid");
  benchmark->add_option("--config", be.config, "JSON file of flag defaults");
  benchmark->add_option("--corpus", be.corpus, "corpus directory");
  benchmark->add_option("--out", be.out, "output directory");
  benchmark->add_option("--segmenters", be.segmenters, "segmenters")->delimiter(',');
  benchmark->add_option("--methods", be.methods, "method versions, e.g. mindful:2,random:1000")->delimiter(',');
  benchmark->add_option("--top-k", be.top_k, "top-k values")->delimiter(',');
  benchmark->add_option("--runs", be.runs, "repetitions per cell");
  benchmark->add_option("--seed", be.seed, "baseline seed of run 0");
  benchmark->add_option("--bernoulli-p", be.bernoulli_p, "random-baseline activation probability");
  benchmark->add_option("--thresholds", be.thresholds, "threshold table JSON");
  benchmark->add_option("--threshold", be.threshold, "threshold for every class");
  benchmark->add_flag("--calibrate", be.calibrate, "calibrate thresholds on the corpus calibration split");
  benchmark->add_flag("--dedupe", be.dedupe, "collapse identical masks before fitting");
  benchmark->add_option("--mask-mode", be.mask_mode, "raw or bbox");
  be.seg.add(*benchmark);
  be.clf.add(*benchmark);
  be.sur.add(*benchmark);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score explanations against annotation boxes");
  evaluate->add_option("--config", ev.config, "JSON file of flag defaults");
  evaluate->add_option("--explanations", ev.explanations, "explanation JSON file or directory");
  evaluate->add_option("--annotations", ev.annotations, "annotation CSV");
  evaluate->add_option("--out", ev.out, "metrics CSV to write");
  evaluate->add_option("--summary", ev.summary, "aggregate JSON to write");

  CorpusArgs co;
  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus");
  gen->add_option("--config", co.config, "JSON file of flag defaults");
  gen->add_option("--out", co.out, "output directory");
  gen->add_option("--count", co.spec.count, "images");
  gen->add_option("--calibration", co.spec.calibration_count, "calibration images");
  gen->add_option("--width", co.spec.width, "image width");
  gen->add_option("--height", co.spec.height, "image height");
  gen->add_option("--seed", co.spec.seed, "generator seed");
  gen->add_option("--prevalence", co.spec.prevalence, "chance each class is present");
  gen->add_option("--distractors", co.spec.distractors, "bright distractor blobs per image");
  gen->add_option("--noise", co.spec.noise, "background noise std-dev");

  std::string url;
  int health_timeout = 10;
  auto* serve = app.add_subcommand("serve-check", "ping a remote classifier's health endpoint");
  serve->add_option("--url", url, std::string("classifier URL (default: ") + kUrlEnv + ")");
  serve->add_option("--timeout", health_timeout, "timeout in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (explain->parsed()) {
      apply_config(*explain, ex.config);
      return cmd_explain(ex, out, err);
    }
    if (calibrate->parsed()) {
      apply_config(*calibrate, ca.config);
      return cmd_calibrate(ca, out, err);
    }
    if (benchmark->parsed()) {
      apply_config(*benchmark, be.config);
      return cmd_benchmark(be, out, err);
    }
    if (evaluate->parsed()) {
      apply_config(*evaluate, ev.config);
      return cmd_evaluate(ev, out, err);
    }
    if (gen->parsed()) {
      apply_config(*gen, co.config);
      return cmd_gen_corpus(co, out, err);
    }
    if (serve->parsed()) return cmd_serve_check(url, health_timeout, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ClassifierError& e) {
    err << "error: classifier failure";
    if (!e.request_id().empty()) err << " (request " << e.request_id() << ")";
    err << ": " << e.what() << '\n';
    return kExitClassifier;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace mindful::harness
