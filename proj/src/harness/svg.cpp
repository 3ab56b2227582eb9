#include "mindful/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mindful/csv.hpp"

namespace mindful::harness {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string fixed(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars, double y_max) {
  const double left = 70;
  const double right = 20;
  const double top = 40;
  const double bottom = 150;
  const double bar_w = 36;
  const double gap = 18;
  const double plot_h = 260;
  const double plot_w = std::max(200.0, static_cast<double>(bars.size()) * (bar_w + gap) + gap);
  const double width = left + plot_w + right;
  const double height = top + plot_h + bottom;

  double vmax = y_max;
  for (const auto& b : bars)
    if (std::isfinite(b.value)) vmax = std::max(vmax, b.value);
  if (!(vmax > 0)) vmax = 1.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\""
    << fixed(height) << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(height) << "\">\n";
  s << "  <title>" << xml_escape(title) << "</title>\n";
  s << "  <rect x=\"0\" y=\"0\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
    << "\" fill=\"white\"/>\n";
  s << "  <text x=\"" << fixed(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << xml_escape(title) << "</text>\n";
  s << "  <text x=\"16\" y=\"" << fixed(top + plot_h / 2) << "\" transform=\"rotate(-90 16 "
    << fixed(top + plot_h / 2) << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(y_label) << "</text>\n";
  // Axes and ticks.
  s << "  <line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left) << "\" y2=\""
    << fixed(top + plot_h) << "\" stroke=\"black\"/>\n";
  s << "  <line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + plot_h) << "\" x2=\"" << fixed(left + plot_w)
    << "\" y2=\"" << fixed(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = vmax * t / 4.0;
    const double y = top + plot_h - plot_h * t / 4.0;
    s << "  <text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fixed(v, 3) << "</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double v = std::isfinite(bars[i].value) ? std::max(0.0, bars[i].value) : 0.0;
    const double h = plot_h * v / vmax;
    const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
    const double y = top + plot_h - h;
    s << "  <rect class=\"bar\" x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(bar_w)
      << "\" height=\"" << fixed(h) << "\" fill=\"#4a78b5\" data-label=\"" << xml_escape(bars[i].label)
      << "\" data-value=\"" << csv::number(bars[i].value) << "\"/>\n";
    const double lx = x + bar_w / 2;
    const double ly = top + plot_h + 10;
    s << "  <text x=\"" << fixed(lx) << "\" y=\"" << fixed(ly) << "\" transform=\"rotate(45 " << fixed(lx) << ' '
      << fixed(ly) << ")\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(bars[i].label)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mindful::harness
