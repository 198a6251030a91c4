// Copyright 2026 The mfgmajor Authors. All rights reserved.
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

#include "mfgmajor/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {
namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 180.0, kTop = 40.0, kBottom = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string Escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

// Round step 1, 2 or 5 times a power of ten giving about `target` ticks.
double TickStep(const Range& r, int target) {
  const double raw = (r.hi - r.lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string Num(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

void WriteSvg(std::ostream& out, const LinePlot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw DomainError("plot series x and y differ in length");
    if (!s.lo.empty() && (s.lo.size() != s.y.size() || s.hi.size() != s.y.size())) {
      throw DomainError("plot band does not match the series");
    }
    for (double v : s.x) xr.Add(v);
    for (double v : s.y) yr.Add(v);
    for (double v : s.lo) yr.Add(v);
    for (double v : s.hi) yr.Add(v);
  }
  xr.Finish();
  yr.Finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     Num(kLeft + pw / 2), Escape(plot.title));

  // Axes and ticks.
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                     "stroke=\"black\"/>\n",
                     Num(kLeft), Num(kTop), Num(pw), Num(ph));
  const double xs = TickStep(xr, 8), ys = TickStep(yr, 6);
  for (double x = std::ceil(xr.lo / xs) * xs; x <= xr.hi + 1e-9 * xs; x += xs) {
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>"
                       "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
                       Num(px(x)), Num(kTop + ph), Num(kTop + ph + 5), Num(kTop + ph + 18),
                       fmt::format("{:g}", std::abs(x) < 1e-12 * xs ? 0.0 : x));
  }
  for (double y = std::ceil(yr.lo / ys) * ys; y <= yr.hi + 1e-9 * ys; y += ys) {
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>"
                       "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>\n",
                       Num(kLeft - 5), Num(py(y)), Num(kLeft), Num(kLeft - 8), Num(py(y) + 4),
                       fmt::format("{:g}", std::abs(y) < 1e-12 * ys ? 0.0 : y));
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     Num(kLeft + pw / 2), Num(kHeight - 12), Escape(plot.x_label));
  out << fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                     Num(kTop + ph / 2), Escape(plot.y_label));

  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const PlotSeries& s = plot.series[i];
    const char* color = kColors[i % std::size(kColors)];
    if (!s.lo.empty()) {
      // One polygon per finite run of the band.
      std::size_t k = 0;
      while (k < s.x.size()) {
        while (k < s.x.size() && !(std::isfinite(s.lo[k]) && std::isfinite(s.hi[k]))) ++k;
        std::size_t end = k;
        while (end < s.x.size() && std::isfinite(s.lo[end]) && std::isfinite(s.hi[end])) ++end;
        if (end > k) {
          std::string pts;
          for (std::size_t j = k; j < end; ++j) pts += Num(px(s.x[j])) + "," + Num(py(s.hi[j])) + " ";
          for (std::size_t j = end; j-- > k;) pts += Num(px(s.x[j])) + "," + Num(py(s.lo[j])) + " ";
          out << fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" "
                             "stroke=\"none\"/>\n",
                             pts, color);
        }
        k = end;
      }
    }
    std::string d;
    bool pen = false;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        pen = false;
        continue;
      }
      d += (pen ? "L" : "M") + Num(px(s.x[k])) + " " + Num(py(s.y[k])) + " ";
      pen = true;
    }
    out << fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n", d,
                       color, s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    const double ly = kTop + 10 + 20.0 * i;
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
                       "stroke-width=\"2\"{4}/><text x=\"{5}\" y=\"{6}\">{7}</text>\n",
                       Num(kLeft + pw + 10), Num(ly), Num(kLeft + pw + 35), color,
                       s.dashed ? " stroke-dasharray=\"6 4\"" : "", Num(kLeft + pw + 40),
                       Num(ly + 4), Escape(s.label));
  }
  out << "</svg>\n";
}

}  // namespace mfgmajor
