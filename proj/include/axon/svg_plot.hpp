#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "axon/errors.hpp"

namespace axon::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), y > 0 for log scale
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

}  // namespace detail

/// Self-contained line plot with a linear x axis and a log10 y axis, written
/// as plain SVG shapes and text (no scripts, no external resources).
inline void write_log_line_plot(const std::string& path,
                                const std::string& title,
                                const std::string& x_label,
                                const std::string& y_label,
                                const std::vector<Series>& series) {
  constexpr double width = 720, height = 480;
  constexpr double ml = 70, mr = 20, mt = 40, mb = 50;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double x_min = 0, x_max = 1, y_min_log = -1, y_max_log = 1;
  bool any = false;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      const double yl = std::log10(std::max(y, 1e-16));
      if (!any) {
        x_min = x_max = x;
        y_min_log = y_max_log = yl;
        any = true;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min_log = std::min(y_min_log, yl);
        y_max_log = std::max(y_max_log, yl);
      }
    }
  }
  if (x_max <= x_min) x_max = x_min + 1;
  y_min_log = std::floor(y_min_log);
  y_max_log = std::ceil(y_max_log);
  if (y_max_log <= y_min_log) y_max_log = y_min_log + 1;

  const auto px = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py = [&](double y) {
    const double yl = std::log10(std::max(y, 1e-16));
    return mt + (y_max_log - yl) / (y_max_log - y_min_log) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw IoError("svg: cannot open '" + path + "' for writing");
  using detail::fmt;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // y gridlines and decade labels
  for (double yl = y_min_log; yl <= y_max_log + 0.5; yl += 1.0) {
    const double y = mt + (y_max_log - yl) / (y_max_log - y_min_log) * plot_h;
    out << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\""
        << width - mr << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">1e" << static_cast<long>(yl) << "</text>\n";
  }
  // x ticks: at most ~12 integer-ish ticks
  const double span = x_max - x_min;
  double tick = std::pow(10.0, std::floor(std::log10(std::max(span, 1e-12))));
  while (span / tick > 12.0) tick *= 2.0;
  while (span / tick < 4.0 && tick > 0) tick /= 2.0;
  for (double x = std::ceil(x_min / tick) * tick; x <= x_max + 1e-9; x += tick) {
    out << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << mt + plot_h
        << "\" x2=\"" << fmt(px(x)) << "\" y2=\"" << mt + plot_h + 5
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px(x)) << "\" y=\"" << mt + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt(x) << "</text>\n";
  }
  // axes
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << mt + plot_h / 2 << ")\">" << y_label
      << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << detail::color(i)
        << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.points) out << fmt(px(x)) << "," << fmt(py(y)) << " ";
    out << "\"/>\n";
    for (auto [x, y] : s.points)
      out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
          << "\" r=\"2.5\" fill=\"" << detail::color(i) << "\"/>\n";
    // legend entry
    const double ly = mt + 16 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << ml + plot_w - 150 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << ml + plot_w - 120 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << detail::color(i) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + plot_w - 114 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("svg: write to '" + path + "' failed");
}

}  // namespace axon::svg
