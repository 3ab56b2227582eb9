#pragma once

#include <string>
#include <vector>

#include "mindful/explainer.hpp"

namespace mindful::harness {

// One row per (image, class) explanation with ground truth, scored with
// the raw superpixel mask and with its per-component bounding boxes.
struct EvaluationRow {
  std::string image_id;
  std::string class_id;
  std::string method;
  double iou_raw = 0.0;
  double js_div_raw = 0.0;
  double precision_raw = 0.0;
  double iou_bbox = 0.0;
  double js_div_bbox = 0.0;
  double precision_bbox = 0.0;
  bool empty_explanation = false;  // scored 0 precision, js_div 1
};

// Explanations whose image has no annotations, or whose class has no box
// on that image, are skipped with a warning.
std::vector<EvaluationRow> evaluate_explanations(const std::vector<LoadedExplanation>& explanations,
                                                 const AnnotationSet& annotations,
                                                 Warnings* warnings = nullptr);

extern const std::vector<std::string> kEvaluationHeader;
std::string evaluation_csv(const std::vector<EvaluationRow>& rows);

// Loads every *.explanation.json in `dir`, in name order.
std::vector<LoadedExplanation> load_explanation_dir(const std::string& dir);

}  // namespace mindful::harness
