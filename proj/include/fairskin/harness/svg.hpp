// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace fairskin {

struct SvgSeries {
  std::string name;
  /// One value per x position; missing values leave a gap.
  std::vector<std::optional<double>> values;
};

namespace detail {

inline constexpr const char* kSvgPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

inline std::string SvgEscape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string SvgNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct SvgFrame {
  double width = 640, height = 360, left = 60, right = 150, top = 36, bottom = 48;
  double lo = 0, hi = 1;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double y(double v) const { return top + plot_h() * (1.0 - (v - lo) / (hi - lo)); }
};

inline SvgFrame FrameFor(const std::vector<SvgSeries>& series, bool include_zero) {
  SvgFrame f;
  bool any = false;
  double lo = 0, hi = 0;
  for (const auto& s : series)
    for (const auto& v : s.values)
      if (v && std::isfinite(*v)) {
        lo = any ? std::min(lo, *v) : *v;
        hi = any ? std::max(hi, *v) : *v;
        any = true;
      }
  if (include_zero) lo = std::min(lo, 0.0), hi = std::max(hi, 0.0);
  if (!(hi > lo)) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  f.lo = include_zero && lo >= 0.0 ? 0.0 : lo - pad;
  f.hi = hi + pad;
  return f;
}

inline std::string SvgAxes(const SvgFrame& f, const std::string& title, const std::vector<std::string>& labels,
                           const std::vector<double>& label_x) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + SvgNumber(f.width) + "\" height=\"" +
                  SvgNumber(f.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + SvgNumber(f.width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" + SvgEscape(title) +
       "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = f.lo + (f.hi - f.lo) * k / 4.0;
    const double y = f.y(v);
    s += "<line x1=\"" + SvgNumber(f.left) + "\" x2=\"" + SvgNumber(f.left + f.plot_w()) + "\" y1=\"" + SvgNumber(y) +
         "\" y2=\"" + SvgNumber(y) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + SvgNumber(f.left - 6) + "\" y=\"" + SvgNumber(y + 4) + "\" text-anchor=\"end\">" + SvgNumber(v) +
         "</text>\n";
  }
  s += "<line x1=\"" + SvgNumber(f.left) + "\" x2=\"" + SvgNumber(f.left) + "\" y1=\"" + SvgNumber(f.top) + "\" y2=\"" +
       SvgNumber(f.top + f.plot_h()) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + SvgNumber(f.left) + "\" x2=\"" + SvgNumber(f.left + f.plot_w()) + "\" y1=\"" +
       SvgNumber(f.y(std::clamp(0.0, f.lo, f.hi))) + "\" y2=\"" + SvgNumber(f.y(std::clamp(0.0, f.lo, f.hi))) +
       "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    s += "<text x=\"" + SvgNumber(label_x[i]) + "\" y=\"" + SvgNumber(f.top + f.plot_h() + 16) +
         "\" text-anchor=\"middle\">" + SvgEscape(labels[i]) + "</text>\n";
  return s;
}

inline std::string SvgLegend(const SvgFrame& f, const std::vector<SvgSeries>& series) {
  std::string s;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = f.top + 14.0 * static_cast<double>(i);
    const char* color = kSvgPalette[i % std::size(kSvgPalette)];
    s += "<rect x=\"" + SvgNumber(f.width - f.right + 12) + "\" y=\"" + SvgNumber(y) +
         "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + SvgNumber(f.width - f.right + 26) + "\" y=\"" + SvgNumber(y + 9) + "\">" +
         SvgEscape(series[i].name) + "</text>\n";
  }
  return s;
}

}  // namespace detail

/// Grouped bar chart: one group per category, one bar per series.
inline std::string SvgBarChart(const std::string& title, const std::vector<std::string>& categories,
                               const std::vector<SvgSeries>& series) {
  using namespace detail;
  const SvgFrame f = FrameFor(series, true);
  const double group_w = f.plot_w() / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double bar_w = 0.8 * group_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  std::vector<double> centers;
  for (std::size_t c = 0; c < categories.size(); ++c) centers.push_back(f.left + group_w * (c + 0.5));
  std::string s = SvgAxes(f, title, categories, centers);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kSvgPalette[k % std::size(kSvgPalette)];
    for (std::size_t c = 0; c < categories.size() && c < series[k].values.size(); ++c) {
      const auto& v = series[k].values[c];
      if (!v || !std::isfinite(*v)) continue;
      const double x = f.left + group_w * c + 0.1 * group_w + bar_w * k;
      const double y0 = f.y(std::clamp(0.0, f.lo, f.hi));
      const double y1 = f.y(*v);
      s += "<rect x=\"" + SvgNumber(x) + "\" y=\"" + SvgNumber(std::min(y0, y1)) + "\" width=\"" + SvgNumber(bar_w) +
           "\" height=\"" + SvgNumber(std::abs(y1 - y0)) + "\" fill=\"" + color + "\"><title>" +
           SvgEscape(series[k].name) + ": " + SvgNumber(*v) + "</title></rect>\n";
    }
  }
  return s + SvgLegend(f, series) + "</svg>\n";
}

/// Line chart over evenly spaced x positions labelled by `xs`.
inline std::string SvgLineChart(const std::string& title, const std::vector<std::string>& xs,
                                const std::vector<SvgSeries>& series) {
  using namespace detail;
  const SvgFrame f = FrameFor(series, false);
  const double step = xs.size() > 1 ? f.plot_w() / static_cast<double>(xs.size() - 1) : 0.0;
  std::vector<double> px;
  for (std::size_t i = 0; i < xs.size(); ++i) px.push_back(xs.size() > 1 ? f.left + step * i : f.left + f.plot_w() / 2);
  std::string s = SvgAxes(f, title, xs, px);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kSvgPalette[k % std::size(kSvgPalette)];
    std::string path;
    for (std::size_t i = 0; i < xs.size() && i < series[k].values.size(); ++i) {
      const auto& v = series[k].values[i];
      if (!v || !std::isfinite(*v)) {
        path += " ";
        continue;
      }
      const bool start = path.empty() || path.back() == ' ';
      path += (start ? "M" : "L") + SvgNumber(px[i]) + "," + SvgNumber(f.y(*v));
      s += "<circle cx=\"" + SvgNumber(px[i]) + "\" cy=\"" + SvgNumber(f.y(*v)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    if (!path.empty()) s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
  }
  return s + SvgLegend(f, series) + "</svg>\n";
}

}  // namespace fairskin
