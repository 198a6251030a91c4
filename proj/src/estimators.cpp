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

#include "mfgmajor/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"

namespace mfgmajor {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckPath(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw DomainError("times and values differ in length");
  if (times.size() < 2) throw DomainError("a path needs at least two points");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("times must be strictly increasing");
  }
}

}  // namespace

void IncrementSeries::Validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("increment spacing must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("increments must be finite");
  }
}

IncrementSeries IncrementSeries::FromLevels(double dt, const std::vector<double>& levels) {
  IncrementSeries s;
  s.dt = dt;
  for (std::size_t i = 1; i < levels.size(); ++i) s.values.push_back(levels[i] - levels[i - 1]);
  return s;
}

namespace {

double SumSquares(const IncrementSeries& s) {
  s.Validate();
  if (s.values.size() < 2) {
    throw DomainError(fmt::format("need at least 2 increments, got {}", s.values.size()));
  }
  double acc = 0.0;
  for (double y : s.values) acc += y * y;
  return acc;
}

}  // namespace

double ForecastVolatility(const IncrementSeries& s) {
  const double ss = SumSquares(s);
  return std::sqrt(s.dt) / static_cast<double>(s.values.size() - 1) * ss;
}

double RealizedVolatility(const IncrementSeries& s) {
  const double ss = SumSquares(s);
  return std::sqrt(ss / (static_cast<double>(s.values.size() - 1) * s.dt));
}

double Epanechnikov(double x) { return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0; }

std::vector<double> KernelVolatility(const std::vector<double>& times,
                                     const std::vector<double>& price,
                                     const std::vector<double>& at, double h) {
  CheckPath(times, price);
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  std::vector<double> out(at.size(), kNaN);
  const std::size_t n = times.size() - 1;
  for (std::size_t j = 0; j < at.size(); ++j) {
    const double t = at[j];
    // Left end points t_{i-1} inside [t - h, t + h].
    auto lo = std::lower_bound(times.begin(), times.end() - 1, t - h);
    double num = 0.0, den = 0.0;
    for (std::size_t i = lo - times.begin(); i < n && times[i] <= t + h; ++i) {
      const double w = Epanechnikov((times[i] - t) / h);
      if (w == 0.0) continue;
      const double dp = price[i + 1] - price[i];
      num += w * dp * dp;
      den += w * (times[i + 1] - times[i]);
    }
    if (den > 0.0) out[j] = std::sqrt(num / den);
  }
  return out;
}

CorrelationPoint SampleCorrelation(double t, const std::vector<double>& dy,
                                   const std::vector<double>& dp) {
  if (dy.size() != dp.size()) throw DomainError("increment samples differ in length");
  CorrelationPoint c{t, kNaN, kNaN, kNaN};
  const std::size_t n = dy.size();
  if (n < 2) return c;
  double my = 0.0, mp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    my += dy[k];
    mp += dp[k];
  }
  my /= n;
  mp /= n;
  double syy = 0.0, spp = 0.0, syp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double y = dy[k] - my, p = dp[k] - mp;
    syy += y * y;
    spp += p * p;
    syp += y * p;
  }
  if (!(syy > 0.0) || !(spp > 0.0)) return c;
  c.rho = std::clamp(syp / std::sqrt(syy * spp), -1.0, 1.0);
  if (n > 3) {
    static const double z975 =
        boost::math::quantile(boost::math::normal_distribution<double>(), 0.975);
    const double z = std::atanh(std::clamp(c.rho, -1.0 + 1e-15, 1.0 - 1e-15));
    const double half = z975 / std::sqrt(static_cast<double>(n) - 3.0);
    c.ci_lo = std::tanh(z - half);
    c.ci_hi = std::tanh(z + half);
  }
  return c;
}

CorrelationStudy::CorrelationStudy(const std::vector<double>& times, double window) {
  if (times.size() < 2) throw DomainError("a path needs at least two points");
  if (!(window > 0.0)) throw DomainError("increment window must be positive");
  const double step = times[1] - times[0];
  const double ratio = window / step;
  const int stride = static_cast<int>(std::lround(ratio));
  if (stride < 1 || std::abs(ratio - stride) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError(fmt::format("window {} h is not a multiple of the grid step {} h", window,
                                  step));
  }
  const int n = static_cast<int>(times.size()) - 1;
  for (int k = 0; k + stride <= n; k += stride) {
    starts_.push_back(times[k]);
    first_.push_back(k);
    last_.push_back(k + stride);
  }
  dy_.resize(starts_.size());
  dp_.resize(starts_.size());
}

std::vector<double> CorrelationStudy::Increments(const std::vector<double>& path) const {
  if (!last_.empty() && static_cast<int>(path.size()) <= last_.back()) {
    throw DomainError("path is shorter than the study grid");
  }
  std::vector<double> d(starts_.size());
  for (std::size_t w = 0; w < starts_.size(); ++w) d[w] = path[last_[w]] - path[first_[w]];
  return d;
}

void CorrelationStudy::AddIncrements(const std::vector<double>& dy,
                                     const std::vector<double>& dp) {
  if (dy.size() != starts_.size() || dp.size() != starts_.size()) {
    throw DomainError("increment vectors do not match the windows");
  }
  for (std::size_t w = 0; w < starts_.size(); ++w) {
    dy_[w].push_back(dy[w]);
    dp_[w].push_back(dp[w]);
  }
}

void CorrelationStudy::Add(const std::vector<double>& forecast,
                           const std::vector<double>& price) {
  AddIncrements(Increments(forecast), Increments(price));
}

std::vector<CorrelationPoint> CorrelationStudy::Finish() const {
  std::vector<CorrelationPoint> out;
  for (std::size_t w = 0; w < starts_.size(); ++w) {
    out.push_back(SampleCorrelation(starts_[w], dy_[w], dp_[w]));
  }
  return out;
}

void WriteVolatilityCsv(std::ostream& out, const std::vector<double>& t,
                        const std::vector<double>& sigma) {
  if (t.size() != sigma.size()) throw DomainError("times and volatilities differ in length");
  WriteCsvRow(out, std::vector<std::string>{"t", "sigma_hat"});
  for (std::size_t k = 0; k < t.size(); ++k) WriteCsvRow(out, std::vector<double>{t[k], sigma[k]});
}

void WriteCorrelationCsv(std::ostream& out, const std::vector<CorrelationPoint>& rows) {
  WriteCsvRow(out, std::vector<std::string>{"t", "rho", "ci_lo", "ci_hi"});
  for (const auto& r : rows) {
    WriteCsvRow(out, std::vector<double>{r.t, r.rho, r.ci_lo, r.ci_hi});
  }
}

TimeSeries ReadTimeSeriesCsv(std::istream& in) {
  const CsvTable table = ReadCsv(in);
  TimeSeries s;
  s.t = table.ColumnValues("t");
  s.value = table.ColumnValues("value");
  return s;
}

}  // namespace mfgmajor
