#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "eegkan/experiment/confusion.hpp"
#include "eegkan/experiment/sweep.hpp"

namespace eegkan::report {

inline std::string xml_escape(std::string_view s) {
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

inline std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

namespace detail {

inline constexpr std::array<const char*, 8> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                       "#9467bd", "#8c564b", "#e377c2", "#17becf"};

inline std::string svg_open(int w, int h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " +
         std::to_string(w) + " " + std::to_string(h) + "\">\n"
         "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" fill=\"white\"/>\n";
}

inline std::string text_el(double x, double y, std::string_view s, std::string_view anchor = "middle",
                           int size = 12) {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\">" + xml_escape(s) +
         "</text>\n";
}

}  // namespace detail

/// Multi-series line chart. x positions are plotted as given (callers pass
/// log10 values for logarithmic axes) and labelled with `x_tick_labels`.
inline std::string line_chart_svg(std::string_view title, std::string_view x_label,
                                  std::string_view y_label, const std::vector<Series>& series,
                                  const std::vector<std::pair<double, std::string>>& x_ticks) {
  const int width = 760, height = 480;
  const double left = 70, right = 200, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  for (const auto& t : x_ticks) {
    xmin = std::min(xmin, t.first);
    xmax = std::max(xmax, t.first);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string svg = detail::svg_open(width, height);
  svg += detail::text_el(width / 2.0, 24, title, "middle", 16);
  svg += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" +
         fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& [x, label] : x_ticks) {
    svg += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(px(x)) +
           "\" y2=\"" + fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += detail::text_el(px(x), top + ph + 20, label);
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    svg += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(left) +
           "\" y2=\"" + fmt(py(y)) + "\" stroke=\"black\"/>\n";
    svg += detail::text_el(left - 8, py(y) + 4, fmt(y, 3), "end");
  }
  svg += detail::text_el(left + pw / 2, height - 15, x_label);
  svg += "<text x=\"18\" y=\"" + fmt(top + ph / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(top + ph / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = detail::palette[i % detail::palette.size()];
    std::string pts;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(y)) continue;
      pts += (pts.empty() ? "" : " ") + fmt(px(x)) + "," + fmt(py(y));
      svg += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    if (!pts.empty())
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(i);
    svg += "<line x1=\"" + fmt(left + pw + 15) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(left + pw + 35) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += detail::text_el(left + pw + 40, ly, series[i].label, "start", 11);
  }
  svg += "</svg>\n";
  return svg;
}

/// Seed-mean objective against learning rate, one line per (nodes, epochs).
inline std::string loss_by_lr_svg(const experiment::SweepResult& result, nn::ModelKind kind,
                                  experiment::Objective objective) {
  std::map<std::pair<std::size_t, std::size_t>, std::map<double, std::pair<double, int>>> acc;
  std::map<double, int> lrs;
  for (const auto& r : result.rows) {
    if (r.kind != kind || !r.ok() || !std::isfinite(r.objective(objective))) continue;
    auto& cell = acc[{r.nodes, r.epochs}][r.lr];
    cell.first += r.objective(objective);
    cell.second += 1;
    lrs[r.lr] = 1;
  }
  std::vector<Series> series;
  for (const auto& [key, by_lr] : acc) {
    Series s;
    s.label = "nodes=" + std::to_string(key.first) + ", epochs=" + std::to_string(key.second);
    for (const auto& [lr, cell] : by_lr)
      s.points.emplace_back(std::log10(lr), cell.first / cell.second);
    series.push_back(std::move(s));
  }
  std::vector<std::pair<double, std::string>> ticks;
  for (const auto& [lr, unused] : lrs) ticks.emplace_back(std::log10(lr), text::format_double(lr));
  return line_chart_svg(std::string(nn::to_string(kind)) + " " + experiment::to_string(objective) +
                            " by learning rate",
                        "learning rate (log scale)", std::string("mean ") + experiment::to_string(objective),
                        series, ticks);
}

/// Heatmap of a confusion matrix with the count printed in every cell.
inline std::string confusion_svg(const experiment::ConfusionMatrix& cm, std::string_view title) {
  const std::size_t k = cm.counts.size();
  const double cell = 90, left = 120, top = 70;
  const int width = static_cast<int>(left + cell * static_cast<double>(k) + 40);
  const int height = static_cast<int>(top + cell * static_cast<double>(k) + 60);
  std::size_t peak = 1;
  for (const auto& row : cm.counts)
    for (auto c : row) peak = std::max(peak, c);

  std::string svg = detail::svg_open(width, height);
  svg += detail::text_el(width / 2.0, 24, title, "middle", 16);
  svg += detail::text_el(left + cell * static_cast<double>(k) / 2, 50, "predicted");
  svg += detail::text_el(20, top + cell * static_cast<double>(k) / 2, "true", "start");
  for (std::size_t i = 0; i < k; ++i) {
    svg += detail::text_el(left + cell * (static_cast<double>(i) + 0.5), top - 6, cm.class_names[i]);
    svg += detail::text_el(left - 8, top + cell * (static_cast<double>(i) + 0.5) + 4, cm.class_names[i],
                           "end");
    for (std::size_t j = 0; j < k; ++j) {
      const auto c = cm.counts[i][j];
      const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(c) / static_cast<double>(peak));
      const double x = left + cell * static_cast<double>(j), y = top + cell * static_cast<double>(i);
      svg += "<rect class=\"cell\" data-row=\"" + std::to_string(i) + "\" data-col=\"" +
             std::to_string(j) + "\" data-count=\"" + std::to_string(c) + "\" x=\"" + fmt(x) +
             "\" y=\"" + fmt(y) + "\" width=\"" + fmt(cell) + "\" height=\"" + fmt(cell) +
             "\" fill=\"rgb(" + std::to_string(shade) + "," + std::to_string(shade) + ",255)\" stroke=\"black\"/>\n";
      svg += detail::text_el(x + cell / 2, y + cell / 2 + 5, std::to_string(c), "middle", 14);
    }
  }
  svg += detail::text_el(width / 2.0, height - 20,
                         "accuracy " + fmt(cm.accuracy(), 3) + " (" + std::to_string(cm.trace()) + "/" +
                             std::to_string(cm.total()) + ")");
  svg += "</svg>\n";
  return svg;
}

}  // namespace eegkan::report
