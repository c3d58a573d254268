#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "netsel/error.hpp"

namespace netsel::svg {

// Fixed-precision coordinate formatting keeps the output byte-stable.
inline std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};
  return colors;
}

enum class Marker { Circle, Square, Triangle, Diamond, Cross };

struct ScatterPoint {
  double x = 0;
  double y = 0;
  double size = 4;  // marker radius in px
  Marker marker = Marker::Circle;
  std::string color = "#1f77b4";
  std::string tooltip;
};

struct Axis {
  std::string label;
  double min = 0;
  double max = 1;
};

namespace detail {

struct Frame {
  double width, height, left, right, top, bottom;
  Axis x, y;

  double px(double v) const {
    const double span = x.max - x.min;
    return left + (span == 0 ? 0.5 : (v - x.min) / span) * (width - left - right);
  }
  double py(double v) const {
    const double span = y.max - y.min;
    return height - bottom - (span == 0 ? 0.5 : (v - y.min) / span) * (height - top - bottom);
  }
};

inline void open_svg(std::string& out, double width, double height) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<rect width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
}

inline void draw_axes(std::string& out, const Frame& f, const std::string& title) {
  out += "<text x=\"" + num(f.width / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.height - f.bottom) + "\" x2=\"" +
         num(f.width - f.right) + "\" y2=\"" + num(f.height - f.bottom) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) +
         "\" y2=\"" + num(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x.min + (f.x.max - f.x.min) * i / 4.0;
    const double yv = f.y.min + (f.y.max - f.y.min) * i / 4.0;
    out += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(f.height - f.bottom + 14) +
           "\" text-anchor=\"middle\" font-size=\"9\" font-family=\"sans-serif\">" + num(xv) +
           "</text>\n";
    out += "<text x=\"" + num(f.left - 4) + "\" y=\"" + num(f.py(yv) + 3) +
           "\" text-anchor=\"end\" font-size=\"9\" font-family=\"sans-serif\">" + num(yv) +
           "</text>\n";
  }
  out += "<text x=\"" + num((f.left + f.width - f.right) / 2) + "\" y=\"" + num(f.height - 4) +
         "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + f.x.label +
         "</text>\n";
  out += "<text x=\"12\" y=\"" + num((f.top + f.height - f.bottom) / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\" transform=\"rotate(-90 12 " +
         num((f.top + f.height - f.bottom) / 2) + ")\">" + f.y.label + "</text>\n";
}

inline void draw_marker(std::string& out, double cx, double cy, const ScatterPoint& p) {
  const double r = p.size;
  const std::string title =
      p.tooltip.empty() ? std::string{} : "<title>" + p.tooltip + "</title>";
  switch (p.marker) {
    case Marker::Circle:
      out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + p.color + "\" fill-opacity=\"0.75\">" + title + "</circle>\n";
      break;
    case Marker::Square:
      out += "<rect x=\"" + num(cx - r) + "\" y=\"" + num(cy - r) + "\" width=\"" + num(2 * r) +
             "\" height=\"" + num(2 * r) + "\" fill=\"" + p.color + "\" fill-opacity=\"0.75\">" +
             title + "</rect>\n";
      break;
    case Marker::Triangle:
      out += "<polygon points=\"" + num(cx) + "," + num(cy - r) + " " + num(cx - r) + "," +
             num(cy + r) + " " + num(cx + r) + "," + num(cy + r) + "\" fill=\"" + p.color +
             "\" fill-opacity=\"0.75\">" + title + "</polygon>\n";
      break;
    case Marker::Diamond:
      out += "<polygon points=\"" + num(cx) + "," + num(cy - r) + " " + num(cx + r) + "," +
             num(cy) + " " + num(cx) + "," + num(cy + r) + " " + num(cx - r) + "," + num(cy) +
             "\" fill=\"" + p.color + "\" fill-opacity=\"0.75\">" + title + "</polygon>\n";
      break;
    case Marker::Cross:
      out += "<path d=\"M" + num(cx - r) + " " + num(cy - r) + " L" + num(cx + r) + " " +
             num(cy + r) + " M" + num(cx - r) + " " + num(cy + r) + " L" + num(cx + r) + " " +
             num(cy - r) + "\" stroke=\"" + p.color + "\" stroke-width=\"2\">" + title +
             "</path>\n";
      break;
  }
}

}  // namespace detail

struct LegendEntry {
  std::string label;
  std::string color;
};

// Scatter with an optional highlighted polyline (the frontier).
inline std::string scatter_chart(const std::string& title, Axis x_axis, Axis y_axis,
                                 const std::vector<ScatterPoint>& points,
                                 const std::vector<std::pair<double, double>>& line = {},
                                 const std::vector<LegendEntry>& legend = {}) {
  const double legend_width = legend.empty() ? 0.0 : 150.0;
  detail::Frame f{640 + legend_width, 420, 54, 16 + legend_width, 28, 40, x_axis, y_axis};
  std::string out;
  detail::open_svg(out, f.width, f.height);
  detail::draw_axes(out, f, title);
  if (!line.empty()) {
    std::string pts;
    for (const auto& [x, y] : line)
      pts += num(f.px(x)) + "," + num(f.py(y)) + " ";
    out += "<polyline points=\"" + pts +
           "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
  }
  for (const auto& p : points) detail::draw_marker(out, f.px(p.x), f.py(p.y), p);
  double ly = f.top + 8;
  for (const auto& e : legend) {
    const double lx = f.width - legend_width + 8;
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) +
           "\" width=\"10\" height=\"10\" fill=\"" + e.color + "\"/>\n";
    out += "<text x=\"" + num(lx + 14) + "\" y=\"" + num(ly + 1) +
           "\" font-size=\"10\" font-family=\"sans-serif\">" + e.label + "</text>\n";
    ly += 15;
  }
  out += "</svg>\n";
  return out;
}

// Pie chart with a side legend; fractions must sum to ~1.
inline std::string pie_chart(const std::string& title,
                             const std::vector<std::pair<std::string, double>>& slices) {
  const double width = 560, height = 360, cx = 180, cy = 195, r = 140;
  std::string out;
  detail::open_svg(out, width, height);
  out += "<text x=\"" + num(width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  double angle = -std::numbers::pi / 2;
  double legend_y = 60;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& [label, fraction] = slices[i];
    const std::string& color = palette()[i % palette().size()];
    if (fraction >= 0.999999) {
      out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + color + "\" stroke=\"white\"/>\n";
    } else if (fraction > 0) {
      const double next = angle + fraction * 2 * std::numbers::pi;
      const double x0 = cx + r * std::cos(angle), y0 = cy + r * std::sin(angle);
      const double x1 = cx + r * std::cos(next), y1 = cy + r * std::sin(next);
      const int large = fraction > 0.5 ? 1 : 0;
      out += "<path d=\"M" + num(cx) + " " + num(cy) + " L" + num(x0) + " " + num(y0) + " A" +
             num(r) + " " + num(r) + " 0 " + std::to_string(large) + " 1 " + num(x1) + " " +
             num(y1) + " Z\" fill=\"" + color + "\" stroke=\"white\"/>\n";
      angle = next;
    }
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f%%", fraction * 100.0);
    out += "<rect x=\"360\" y=\"" + num(legend_y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"375\" y=\"" + num(legend_y) +
           "\" font-size=\"10\" font-family=\"sans-serif\">" + label + " (" + pct + ")</text>\n";
    legend_y += 15;
  }
  out += "</svg>\n";
  return out;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

// Stacked per-frame panels (one sub-chart per series), with optional vertical
// markers at context-change frames.
inline std::string timeseries_chart(const std::string& title, const std::string& x_label,
                                    const std::vector<Series>& series,
                                    const std::vector<double>& event_marks = {}) {
  const double panel_height = 170, width = 720;
  const double height = panel_height * static_cast<double>(series.size()) + 24;
  std::string out;
  detail::open_svg(out, width, height);
  out += "<text x=\"" + num(width / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!ser.points.empty()) {
      xmin = xmax = ser.points.front().first;
      ymin = ymax = ser.points.front().second;
      for (const auto& [x, y] : ser.points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
      if (ymin == ymax) {
        ymin -= 1;
        ymax += 1;
      }
      const double pad = (ymax - ymin) * 0.08;
      ymin -= pad;
      ymax += pad;
    }
    const double top_offset = 24 + panel_height * static_cast<double>(s);
    detail::Frame f{width, panel_height, 60, 16, 24, 34, {x_label, xmin, xmax},
                    {ser.label, ymin, ymax}};
    std::string panel;
    detail::draw_axes(panel, f, "");
    std::string pts;
    for (const auto& [x, y] : ser.points) pts += num(f.px(x)) + "," + num(f.py(y)) + " ";
    panel += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + ser.color +
             "\" stroke-width=\"1.5\"/>\n";
    for (const double mark : event_marks)
      panel += "<line x1=\"" + num(f.px(mark)) + "\" y1=\"" + num(f.top) + "\" x2=\"" +
               num(f.px(mark)) + "\" y2=\"" + num(f.height - f.bottom) +
               "\" stroke=\"#888888\" stroke-dasharray=\"4,3\"/>\n";
    out += "<g transform=\"translate(0 " + num(top_offset) + ")\">\n" + panel + "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void write_file(const std::string& content, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << content;
}

}  // namespace netsel::svg
