#include "mindful/harness/evaluate.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "mindful/csv.hpp"
#include "mindful/metrics.hpp"

namespace mindful::harness {

namespace fs = std::filesystem;

const std::vector<std::string> kEvaluationHeader = {
    "image_id", "class_id", "method", "iou_raw", "js_div_raw", "localization_precision_raw",
    "iou_bbox", "js_div_bbox", "localization_precision_bbox", "empty_explanation"};

namespace {

void score(const BinaryPixelMask& gt, const BinaryPixelMask& ex, double& iou_out, double& js_out,
           double& prec_out) {
  iou_out = iou(gt, ex);
  if (ex.count() == 0) {
    js_out = 1.0;
    prec_out = 0.0;
    return;
  }
  js_out = js_div(to_distribution(ex), to_distribution(gt));
  prec_out = 1.0 - js_out;
}

}  // namespace

std::vector<EvaluationRow> evaluate_explanations(const std::vector<LoadedExplanation>& explanations,
                                                 const AnnotationSet& annotations, Warnings* warnings) {
  std::set<std::string> annotated;
  for (const auto& a : annotations.entries) annotated.insert(a.image_id);
  std::set<std::string> unmatched;
  std::vector<EvaluationRow> rows;
  for (const auto& e : explanations) {
    if (annotated.count(e.image_id) == 0) {
      if (unmatched.insert(e.image_id).second)
        warn(warnings, "image " + e.image_id + " has no annotations; skipped");
      continue;
    }
    const auto boxes = annotations.boxes_for(e.image_id, e.class_id);
    if (boxes.empty()) {
      warn(warnings, "image " + e.image_id + " has no box for class " + e.class_id + "; skipped");
      continue;
    }
    const int w = e.pixel_mask.width();
    const int h = e.pixel_mask.height();
    const auto gt = boxes_to_pixel_mask(boxes, w, h);
    EvaluationRow row;
    row.image_id = e.image_id;
    row.class_id = e.class_id;
    row.method = e.method;
    row.empty_explanation = e.pixel_mask.count() == 0;
    score(gt, e.pixel_mask, row.iou_raw, row.js_div_raw, row.precision_raw);
    score(gt, to_bbox_mask(e.pixel_mask), row.iou_bbox, row.js_div_bbox, row.precision_bbox);
    if (row.empty_explanation)
      warn(warnings, "image " + e.image_id + " class " + e.class_id + ": empty explanation scored 0");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string evaluation_csv(const std::vector<EvaluationRow>& rows) {
  std::ostringstream out;
  csv::write_row(out, kEvaluationHeader);
  for (const auto& r : rows)
    csv::write_row(out, {r.image_id, r.class_id, r.method, csv::number(r.iou_raw), csv::number(r.js_div_raw),
                         csv::number(r.precision_raw), csv::number(r.iou_bbox), csv::number(r.js_div_bbox),
                         csv::number(r.precision_bbox), r.empty_explanation ? "1" : "0"});
  return out.str();
}

std::vector<LoadedExplanation> load_explanation_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    const std::string suffix = ".explanation.json";
    if (e.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LoadedExplanation> out;
  for (const auto& f : files) {
    auto part = load_explanation_file(f.string());
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace mindful::harness
