#pragma once

/**
 * @file report.hpp
 * Text tables, summary CSV and the overhead-vs-depth SVG chart.
 *
 * Everything here is a pure function of its input and byte-deterministic.
 */

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "minimon/stats.hpp"

namespace minimon {

struct NamedSummary {
  std::string label;  ///< column name
  std::string config_id;
  std::int64_t depth = 0;
  SummaryStats stats;
};

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0.0000" || s == "-0.00") s.erase(0, 1);
  return s;
}

/// Code points, which is the terminal width for the text used here.
inline std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

inline std::string pad_left(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : std::string(width - w, ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

}  // namespace detail

/// Rows Mean / 95 % / Q1 / Median / Q3, one right-aligned column per summary, µs with 4 decimals.
inline std::string render_table(std::span<const NamedSummary> summaries) {
  if (summaries.empty()) throw std::invalid_argument("render_table needs at least one summary");
  using detail::fixed;
  const std::vector<std::string> row_names{"", "Mean", "95 %", "Q1", "Median", "Q3"};
  std::vector<std::vector<std::string>> columns;
  for (const auto& s : summaries) {
    columns.push_back({s.label, fixed(s.stats.mean, 4), "±" + fixed(s.stats.ci95_half, 4), fixed(s.stats.q1, 4),
                       fixed(s.stats.median, 4), fixed(s.stats.q3, 4)});
  }
  std::size_t name_width = 0;
  for (const auto& r : row_names) name_width = std::max(name_width, detail::display_width(r));
  std::vector<std::size_t> widths;
  for (const auto& col : columns) {
    std::size_t w = 0;
    for (const auto& cell : col) w = std::max(w, detail::display_width(cell));
    widths.push_back(w);
  }
  std::string out;
  for (std::size_t row = 0; row < row_names.size(); ++row) {
    std::string line = detail::pad_right(row_names[row], name_width);
    for (std::size_t c = 0; c < columns.size(); ++c) line += "  " + detail::pad_left(columns[c][row], widths[c]);
    out += line + '\n';
    if (row == 0 || row == 2) {
      std::size_t total = name_width;
      for (const auto w : widths) total += 2 + w;
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

inline std::string render_summary_csv(std::span<const NamedSummary> summaries) {
  using detail::fixed;
  std::string out = "config_id,n,mean_us,ci95_us,q1_us,median_us,q3_us,stddev_us\n";
  for (const auto& s : summaries) {
    out += s.label + ',' + std::to_string(s.stats.n) + ',' + fixed(s.stats.mean, 6) + ',' +
           fixed(s.stats.ci95_half, 6) + ',' + fixed(s.stats.q1, 6) + ',' + fixed(s.stats.median, 6) + ',' +
           fixed(s.stats.q3, 6) + ',' + fixed(s.stats.stddev, 6) + '\n';
  }
  return out;
}

/// Pairwise comparisons among summaries that share a depth, in input order.
inline std::vector<Comparison> pairwise_comparisons(std::span<const NamedSummary> summaries) {
  std::vector<Comparison> out;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    for (std::size_t j = i + 1; j < summaries.size(); ++j) {
      if (summaries[i].depth != summaries[j].depth) continue;
      out.push_back(compare(summaries[i].stats, summaries[j].stats, summaries[i].label, summaries[j].label));
    }
  }
  return out;
}

inline std::string render_comparisons(std::span<const Comparison> comparisons) {
  std::string out;
  for (const auto& c : comparisons) {
    out += c.config_a + " vs " + c.config_b + ": " + to_string(c.direction) +
           (c.significant ? " (significant)" : " (CIs overlap)") + ", ratio b/a = " + detail::fixed(c.ratio, 4) +
           '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Depth chart
// ---------------------------------------------------------------------------

struct DepthPoint {
  std::int64_t depth = 0;
  double mean = 0.0;  ///< µs
  double stddev = 0.0;
};

struct DepthSeries {
  std::string config_id;
  std::vector<DepthPoint> points;  ///< ascending depth
};

/// Pixel mapping shared by the renderer and anyone reading the chart back.
struct ChartLayout {
  static constexpr double kWidth = 860.0;
  static constexpr double kHeight = 500.0;
  static constexpr double kLeft = 80.0;
  static constexpr double kRight = 220.0;
  static constexpr double kTop = 30.0;
  static constexpr double kBottom = 60.0;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  static ChartLayout fit(std::span<const DepthSeries> series) {
    ChartLayout l;
    l.x_min = std::numeric_limits<double>::max();
    l.x_max = std::numeric_limits<double>::lowest();
    double lo = 0.0, hi = 0.0;
    for (const auto& s : series) {
      for (const auto& p : s.points) {
        l.x_min = std::min(l.x_min, static_cast<double>(p.depth));
        l.x_max = std::max(l.x_max, static_cast<double>(p.depth));
        lo = std::min(lo, p.mean - p.stddev);
        hi = std::max(hi, p.mean + p.stddev);
      }
    }
    if (hi <= lo) hi = lo + 1.0;
    l.y_min = lo;
    l.y_max = hi + 0.05 * (hi - lo);
    return l;
  }

  double x(double depth) const { return kLeft + (depth - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); }
  double y(double value) const {
    return kHeight - kBottom - (value - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  }
};

namespace detail {
inline constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
}

/// Static SVG: one polyline per configuration plus a translucent mean ± σ band.
inline std::string render_depth_chart(std::span<const DepthSeries> series) {
  using detail::fixed;
  if (series.empty()) throw std::invalid_argument("depth chart needs at least one configuration");
  std::vector<std::int64_t> depths;
  for (const auto& s : series) {
    for (const auto& p : s.points) depths.push_back(p.depth);
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.size() < 2) throw std::invalid_argument("depth chart needs at least two distinct depths");

  const ChartLayout l = ChartLayout::fit(series);
  const auto px = [](double v) { return fixed(v, 2); };
  const double plot_right = ChartLayout::kWidth - ChartLayout::kRight;
  const double plot_bottom = ChartLayout::kHeight - ChartLayout::kBottom;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(ChartLayout::kWidth) + "\" height=\"" +
         px(ChartLayout::kHeight) + "\" viewBox=\"0 0 " + px(ChartLayout::kWidth) + " " + px(ChartLayout::kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + px(ChartLayout::kWidth) + "\" height=\"" + px(ChartLayout::kHeight) +
         "\" fill=\"white\"/>\n";

  // axes
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + px(ChartLayout::kLeft) + "\" y1=\"" + px(plot_bottom) + "\" x2=\"" + px(plot_right) +
         "\" y2=\"" + px(plot_bottom) + "\"/>\n";
  svg += "<line x1=\"" + px(ChartLayout::kLeft) + "\" y1=\"" + px(ChartLayout::kTop) + "\" x2=\"" +
         px(ChartLayout::kLeft) + "\" y2=\"" + px(plot_bottom) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g class=\"ticks\">\n";
  for (const auto d : depths) {
    const double x = l.x(static_cast<double>(d));
    svg += "<line x1=\"" + px(x) + "\" y1=\"" + px(plot_bottom) + "\" x2=\"" + px(x) + "\" y2=\"" +
           px(plot_bottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + px(x) + "\" y=\"" + px(plot_bottom + 18) + "\" text-anchor=\"middle\">" +
           std::to_string(d) + "</text>\n";
  }
  constexpr int kYTicks = 5;
  for (int i = 0; i <= kYTicks; ++i) {
    const double v = l.y_min + (l.y_max - l.y_min) * i / kYTicks;
    const double y = l.y(v);
    svg += "<line x1=\"" + px(ChartLayout::kLeft - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(ChartLayout::kLeft) +
           "\" y2=\"" + px(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + px(ChartLayout::kLeft - 8) + "\" y=\"" + px(y + 4) + "\" text-anchor=\"end\">" +
           fixed(v, 3) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + px((ChartLayout::kLeft + plot_right) / 2) + "\" y=\"" + px(ChartLayout::kHeight - 15) +
         "\" text-anchor=\"middle\">Call tree depth</text>\n";
  svg += "<text x=\"20\" y=\"" + px((ChartLayout::kTop + plot_bottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + px((ChartLayout::kTop + plot_bottom) / 2) +
         ")\">Overhead per iteration (µs)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = detail::kPalette[i % std::size(detail::kPalette)];
    const std::string id = detail::xml_escape(s.config_id);
    std::string band, line;
    for (const auto& p : s.points) {
      band += px(l.x(static_cast<double>(p.depth))) + "," + px(l.y(p.mean + p.stddev)) + " ";
    }
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      band += px(l.x(static_cast<double>(it->depth))) + "," + px(l.y(it->mean - it->stddev)) + " ";
    }
    for (const auto& p : s.points) line += px(l.x(static_cast<double>(p.depth))) + "," + px(l.y(p.mean)) + " ";
    if (!band.empty()) band.pop_back();
    if (!line.empty()) line.pop_back();
    svg += "<g class=\"series\" data-config=\"" + id + "\">\n";
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"mean\" points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    for (const auto& p : s.points) {
      svg += "<circle cx=\"" + px(l.x(static_cast<double>(p.depth))) + "\" cy=\"" + px(l.y(p.mean)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "</g>\n";
    const double ly = ChartLayout::kTop + 10 + 20.0 * static_cast<double>(i);
    svg += "<g class=\"legend\">\n";
    svg += "<rect x=\"" + px(plot_right + 20) + "\" y=\"" + px(ly - 8) + "\" width=\"14\" height=\"10\" fill=\"" +
           color + "\"/>\n";
    svg += "<text x=\"" + px(plot_right + 40) + "\" y=\"" + px(ly + 2) + "\">" + id + "</text>\n";
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// Groups per-depth summaries into one series per configuration, first-seen order.
inline std::vector<DepthSeries> depth_series(std::span<const NamedSummary> summaries) {
  std::vector<DepthSeries> out;
  for (const auto& s : summaries) {
    auto it = std::find_if(out.begin(), out.end(), [&](const DepthSeries& d) { return d.config_id == s.config_id; });
    if (it == out.end()) {
      out.push_back(DepthSeries{s.config_id, {}});
      it = std::prev(out.end());
    }
    it->points.push_back(DepthPoint{s.depth, s.stats.mean, s.stats.stddev});
  }
  for (auto& d : out) {
    std::sort(d.points.begin(), d.points.end(),
              [](const DepthPoint& a, const DepthPoint& b) { return a.depth < b.depth; });
  }
  return out;
}

}  // namespace minimon
