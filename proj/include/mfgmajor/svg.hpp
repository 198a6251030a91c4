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

#ifndef MFGMAJOR_SVG_HPP_
#define MFGMAJOR_SVG_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace mfgmajor {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional confidence band; empty or same length as y.
  std::vector<double> lo;
  std::vector<double> hi;
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Minimal line plot with axes, ticks, legend and shaded bands. NaN values
// break the line.
void WriteSvg(std::ostream& out, const LinePlot& plot);

}  // namespace mfgmajor

#endif  // MFGMAJOR_SVG_HPP_
