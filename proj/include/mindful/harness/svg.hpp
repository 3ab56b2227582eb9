#pragma once

#include <string>
#include <vector>

namespace mindful::harness {

struct Bar {
  std::string label;
  double value = 0.0;
};

// Static vertical bar chart. Each bar is a <rect class="bar"> carrying
// data-label and data-value attributes, so charts can be checked
// mechanically.
std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars, double y_max = 0.0);

std::string xml_escape(const std::string& s);

}  // namespace mindful::harness
