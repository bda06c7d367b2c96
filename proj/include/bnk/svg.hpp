#pragma once

// Minimal SVG line chart: axes, tick labels, legend, any number of series
// sharing one categorical x axis.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace bnk {

struct ChartSeries {
  std::string name;
  std::vector<double> values;  // NaN = no point
  std::string color = "#1f77b4";
};

struct LineChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> x_labels;
  std::vector<ChartSeries> series;
  int width = 900;
  int height = 420;
};

namespace detail {
inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace detail

inline std::string render_svg(const LineChart& c) {
  const double left = 70, right = 20, top = 40, bottom = 60;
  const double pw = c.width - left - right, ph = c.height - top - bottom;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t n = c.x_labels.size();
  for (const auto& s : c.series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) lo = -1, hi = 1;
  if (hi - lo < 1e-12) lo -= 1.0, hi += 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto xpos = [&](std::size_t k) { return left + (n > 1 ? pw * static_cast<double>(k) / static_cast<double>(n - 1) : pw / 2); };
  auto ypos = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(c.width) + "\" height=\"" +
         std::to_string(c.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::fmt("%.1f", c.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::xml_escape(c.title) + "</text>\n";
  out += "<line x1=\"" + detail::fmt("%.1f", left) + "\" y1=\"" + detail::fmt("%.1f", top + ph) + "\" x2=\"" +
         detail::fmt("%.1f", left + pw) + "\" y2=\"" + detail::fmt("%.1f", top + ph) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::fmt("%.1f", left) + "\" y1=\"" + detail::fmt("%.1f", top) + "\" x2=\"" +
         detail::fmt("%.1f", left) + "\" y2=\"" + detail::fmt("%.1f", top + ph) + "\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double v = lo + (hi - lo) * k / 5.0;
    const double y = ypos(v);
    out += "<line x1=\"" + detail::fmt("%.1f", left - 4) + "\" y1=\"" + detail::fmt("%.1f", y) + "\" x2=\"" +
           detail::fmt("%.1f", left + pw) + "\" y2=\"" + detail::fmt("%.1f", y) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + detail::fmt("%.1f", left - 6) + "\" y=\"" + detail::fmt("%.1f", y + 4) +
           "\" text-anchor=\"end\">" + detail::fmt("%.3g", v) + "</text>\n";
  }
  if (lo < 0.0 && hi > 0.0) {
    out += "<line x1=\"" + detail::fmt("%.1f", left) + "\" y1=\"" + detail::fmt("%.1f", ypos(0.0)) + "\" x2=\"" +
           detail::fmt("%.1f", left + pw) + "\" y2=\"" + detail::fmt("%.1f", ypos(0.0)) + "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  const std::size_t stride = std::max<std::size_t>(1, c.x_labels.size() / 10);
  for (std::size_t k = 0; k < c.x_labels.size(); k += stride) {
    out += "<text x=\"" + detail::fmt("%.1f", xpos(k)) + "\" y=\"" + detail::fmt("%.1f", top + ph + 16) +
           "\" text-anchor=\"middle\">" + detail::xml_escape(c.x_labels[k]) + "</text>\n";
  }
  if (!c.y_label.empty()) {
    out += "<text transform=\"rotate(-90)\" x=\"" + detail::fmt("%.1f", -(top + ph / 2)) +
           "\" y=\"16\" text-anchor=\"middle\">" + detail::xml_escape(c.y_label) + "</text>\n";
  }

  for (std::size_t s = 0; s < c.series.size(); ++s) {
    const auto& ser = c.series[s];
    std::string d;
    bool pen_down = false;
    for (std::size_t k = 0; k < ser.values.size(); ++k) {
      if (!std::isfinite(ser.values[k])) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : " M") + detail::fmt("%.2f", xpos(k)) + "," + detail::fmt("%.2f", ypos(ser.values[k]));
      pen_down = true;
    }
    out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.8\"/>\n";
    const double ly = top + ph + 38;
    const double lx = left + 160.0 * static_cast<double>(s);
    out += "<line x1=\"" + detail::fmt("%.1f", lx) + "\" y1=\"" + detail::fmt("%.1f", ly) + "\" x2=\"" +
           detail::fmt("%.1f", lx + 24) + "\" y2=\"" + detail::fmt("%.1f", ly) + "\" stroke=\"" + ser.color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::fmt("%.1f", lx + 30) + "\" y=\"" + detail::fmt("%.1f", ly + 4) + "\">" +
           detail::xml_escape(ser.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace bnk
