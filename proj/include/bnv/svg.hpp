#pragma once

// Minimal built-in SVG line charts for monitor series, sensitivity grids
// and distance grids. No plotting dependency. The polyline breaks at
// undefined points; undefined positions are marked by ticks along the
// bottom edge. Reference lines (e.g. +-1.96 for monitors) are dashed.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace bnv {

struct ChartOptions {
  int width = 640;
  int height = 400;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> reference_lines;  // horizontal, in y units
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string render_line_chart(const std::vector<double>& x,
                                     const std::vector<std::optional<double>>& y,
                                     const ChartOptions& opt = {}) {
  const double ml = 56, mr = 16, mt = opt.title.empty() ? 16 : 34, mb = 44;
  const double pw = opt.width - ml - mr;
  const double ph = opt.height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!y[i] || !std::isfinite(*y[i])) continue;
    if (!any) {
      xmin = xmax = x[i];
      ymin = ymax = *y[i];
      any = true;
    } else {
      xmin = std::min(xmin, x[i]);
      xmax = std::max(xmax, x[i]);
      ymin = std::min(ymin, *y[i]);
      ymax = std::max(ymax, *y[i]);
    }
  }
  for (double r : opt.reference_lines) {
    ymin = any ? std::min(ymin, r) : r;
    ymax = any ? std::max(ymax, r) : r;
    any = true;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
       "\" height=\"" + std::to_string(opt.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s += "<text x=\"" + detail::svg_num(ml + pw / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         opt.title + "</text>\n";

  // frame
  s += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
       detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) +
       "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (double r : opt.reference_lines)
    s += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py(r)) +
         "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(py(r)) +
         "\" stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";

  // axis extremes
  s += "<text x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt + ph + 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
       detail::tick_label(xmin) + "</text>\n";
  s += "<text x=\"" + detail::svg_num(ml + pw) + "\" y=\"" + detail::svg_num(mt + ph + 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
       detail::tick_label(xmax) + "</text>\n";
  s += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" + detail::svg_num(py(ymin)) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
       detail::tick_label(ymin) + "</text>\n";
  s += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" + detail::svg_num(py(ymax) + 8) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
       detail::tick_label(ymax) + "</text>\n";
  if (!opt.x_label.empty())
    s += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(mt + ph + 34) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         opt.x_label + "</text>\n";
  if (!opt.y_label.empty())
    s += "<text x=\"14\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 14 " +
         detail::svg_num(mt + ph / 2) + ")\">" + opt.y_label + "</text>\n";

  // polyline segments between consecutive defined points
  std::string path;
  bool open = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] && std::isfinite(*y[i])) {
      path += (open ? " L " : "M ") + detail::svg_num(px(x[i])) + "," +
              detail::svg_num(py(*y[i]));
      open = true;
    } else {
      open = false;
    }
  }
  if (!path.empty())
    s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";

  // markers for undefined points along the bottom edge
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!y[i] || !std::isfinite(*y[i]))
      s += "<line x1=\"" + detail::svg_num(px(x[i])) + "\" y1=\"" +
           detail::svg_num(mt + ph - 5) + "\" x2=\"" + detail::svg_num(px(x[i])) +
           "\" y2=\"" + detail::svg_num(mt + ph) +
           "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

  s += "</svg>\n";
  return s;
}

}  // namespace bnv
