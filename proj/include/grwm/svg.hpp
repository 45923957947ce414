// Copyright 2026 The grwm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "grwm/errors.hpp"

namespace grwm::svg {

// Minimal, deterministic SVG emitters. Numbers are printed with a fixed
// format so identical inputs give identical bytes.

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> header_lines;  // rendered under the title (config echo)
  std::optional<double> h_line;           // e.g. the threshold
  bool log_y = false;
  double width = 720.0;
  double height = 420.0;
};

namespace detail {

struct Frame {
  double left = 70, right = 20, top = 60, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  double w = 720, h = 420;
  bool log_y = false;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const {
    const double v = log_y ? std::log10(std::max(y, 1e-300)) : y;
    return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom);
  }
};

inline std::string open(const Frame& f, const PlotOptions& o) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.w) << "\" height=\"" << num(f.h)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(f.left) << "\" y=\"18\" font-size=\"14\">" << escape(o.title) << "</text>\n";
  double y = 32;
  for (const auto& line : o.header_lines) {
    s << "<text x=\"" << num(f.left) << "\" y=\"" << num(y) << "\" fill=\"#555\">" << escape(line) << "</text>\n";
    y += 12;
  }
  s << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.w - f.left - f.right)
    << "\" height=\"" << num(f.h - f.top - f.bottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num(f.w / 2) << "\" y=\"" << num(f.h - 12) << "\" text-anchor=\"middle\">"
    << escape(o.x_label) << "</text>\n";
  s << "<text x=\"14\" y=\"" << num(f.h / 2) << "\" transform=\"rotate(-90 14 " << num(f.h / 2)
    << ")\" text-anchor=\"middle\">" << escape(o.y_label) << "</text>\n";
  const char* fmt_lo = f.log_y ? "1e%.0f" : "%.3g";
  char lo[32], hi[32];
  std::snprintf(lo, sizeof lo, fmt_lo, f.y0);
  std::snprintf(hi, sizeof hi, fmt_lo, f.y1);
  s << "<text x=\"" << num(f.left - 4) << "\" y=\"" << num(f.h - f.bottom) << "\" text-anchor=\"end\">" << lo
    << "</text>\n";
  s << "<text x=\"" << num(f.left - 4) << "\" y=\"" << num(f.top + 8) << "\" text-anchor=\"end\">" << hi
    << "</text>\n";
  std::snprintf(lo, sizeof lo, "%.3g", f.x0);
  std::snprintf(hi, sizeof hi, "%.3g", f.x1);
  s << "<text x=\"" << num(f.left) << "\" y=\"" << num(f.h - f.bottom + 14) << "\">" << lo << "</text>\n";
  s << "<text x=\"" << num(f.w - f.right) << "\" y=\"" << num(f.h - f.bottom + 14) << "\" text-anchor=\"end\">"
    << hi << "</text>\n";
  return s.str();
}

inline void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

}  // namespace detail

/// Line plot of one or more series sharing axes.
inline std::string line_plot(const std::vector<Series>& series, const PlotOptions& o) {
  if (series.empty()) throw ParameterError("svg: nothing to plot");
  detail::Frame f;
  f.w = o.width;
  f.h = o.height;
  f.log_y = o.log_y;
  f.top = 50.0 + 12.0 * static_cast<double>(o.header_lines.size());
  bool first = true;
  auto tr = [&](double y) { return o.log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (first) {
        f.x0 = f.x1 = s.x[i];
        f.y0 = f.y1 = tr(s.y[i]);
        first = false;
      }
      f.x0 = std::min(f.x0, s.x[i]);
      f.x1 = std::max(f.x1, s.x[i]);
      f.y0 = std::min(f.y0, tr(s.y[i]));
      f.y1 = std::max(f.y1, tr(s.y[i]));
    }
  }
  if (o.h_line) {
    f.y0 = std::min(f.y0, tr(*o.h_line));
    f.y1 = std::max(f.y1, tr(*o.h_line));
  }
  if (!o.log_y) f.y0 = std::min(f.y0, 0.0);
  detail::pad(f.x0, f.x1);
  detail::pad(f.y0, f.y1);

  std::ostringstream out;
  out << detail::open(f, o);
  if (o.h_line) {
    out << "<line x1=\"" << num(f.left) << "\" x2=\"" << num(f.w - f.right) << "\" y1=\"" << num(f.py(*o.h_line))
        << "\" y2=\"" << num(f.py(*o.h_line)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  }
  double legend_y = f.top + 14;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << num(f.w - f.right - 6) << "\" y=\"" << num(legend_y) << "\" text-anchor=\"end\" fill=\""
        << s.color << "\">" << escape(s.label) << "</text>\n";
    legend_y += 13;
  }
  out << "</svg>\n";
  return out.str();
}

/// Histogram of `values` in `bins` equal-width bins.
inline std::string histogram(const std::vector<double>& values, std::size_t bins, const PlotOptions& o) {
  if (values.empty() || bins == 0) throw ParameterError("svg: histogram needs values and bins");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  detail::pad(lo, hi);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  detail::Frame f;
  f.w = o.width;
  f.h = o.height;
  f.top = 50.0 + 12.0 * static_cast<double>(o.header_lines.size());
  f.x0 = lo;
  f.x1 = hi;
  f.y0 = 0.0;
  f.y1 = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  detail::pad(f.y0, f.y1);
  std::ostringstream out;
  out << detail::open(f, o);
  const double bw = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double x = lo + bw * static_cast<double>(b);
    const double top = f.py(static_cast<double>(counts[b]));
    out << "<rect x=\"" << num(f.px(x)) << "\" y=\"" << num(top) << "\" width=\""
        << num(f.px(x + bw) - f.px(x)) << "\" height=\"" << num(f.py(0.0) - top)
        << "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace grwm::svg
