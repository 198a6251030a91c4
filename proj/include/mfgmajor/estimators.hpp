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

#ifndef MFGMAJOR_ESTIMATORS_HPP_
#define MFGMAJOR_ESTIMATORS_HPP_

#include <iosfwd>
#include <vector>

namespace mfgmajor {

// Increments Y_i = X_{t_i} - X_{t_{i-1}} observed every dt hours.
struct IncrementSeries {
  double dt = 0.0;
  std::vector<double> values;

  // Throws DomainError unless dt > 0 and every value is finite.
  void Validate() const;
  static IncrementSeries FromLevels(double dt, const std::vector<double>& levels);
};

// sqrt(dt) / (n' - 1) * sum Y_i^2, as used to calibrate the forecast
// volatilities. Not dimensionally a volatility; see RealizedVolatility.
double ForecastVolatility(const IncrementSeries& series);
// sqrt(sum Y_i^2 / ((n' - 1) dt)).
double RealizedVolatility(const IncrementSeries& series);

// K(x) = 3/4 (1 - x^2) on [-1, 1].
double Epanechnikov(double x);

inline constexpr double kDefaultBandwidth = 0.08;  // hours

// Instantaneous volatility
//   sigma_t^2 = sum_i K_h(t_{i-1} - t) dP_{i-1}^2 / sum_i K_h(t_{i-1} - t) (t_i - t_{i-1})
// with dP_{i-1} = P_{t_i} - P_{t_{i-1}}, evaluated at each entry of
// `at`. NaN where no increment falls inside the window. Windows are
// one-sided near the ends of the path.
std::vector<double> KernelVolatility(const std::vector<double>& times,
                                     const std::vector<double>& price,
                                     const std::vector<double>& at,
                                     double bandwidth = kDefaultBandwidth);

struct CorrelationPoint {
  double t = 0.0;
  double rho = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Cross-sample correlation of two increment samples with a Fisher-z 95%
// interval. rho is NaN when either sample has zero variance or fewer than
// two draws; the interval needs at least four.
CorrelationPoint SampleCorrelation(double t, const std::vector<double>& dy,
                                   const std::vector<double>& dp);

// Accumulates increments over consecutive windows of `window` hours and
// correlates them across scenarios at each window start.
class CorrelationStudy {
 public:
  CorrelationStudy(const std::vector<double>& times, double window);

  int n_windows() const { return static_cast<int>(starts_.size()); }
  const std::vector<double>& window_starts() const { return starts_; }

  // Adds one scenario; paths live on `times`.
  void Add(const std::vector<double>& forecast, const std::vector<double>& price);
  // Increments of one path per window, in window order.
  std::vector<double> Increments(const std::vector<double>& path) const;
  // Adds precomputed increments.
  void AddIncrements(const std::vector<double>& dy, const std::vector<double>& dp);

  std::vector<CorrelationPoint> Finish() const;

 private:
  std::vector<double> starts_;
  std::vector<int> first_, last_;
  std::vector<std::vector<double>> dy_, dp_;  // per window
};

// Columns t,sigma_hat and t,rho,ci_lo,ci_hi.
void WriteVolatilityCsv(std::ostream& out, const std::vector<double>& t,
                        const std::vector<double>& sigma);
void WriteCorrelationCsv(std::ostream& out, const std::vector<CorrelationPoint>& rows);

// External series with columns t,value.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
};
TimeSeries ReadTimeSeriesCsv(std::istream& in);

}  // namespace mfgmajor

#endif  // MFGMAJOR_ESTIMATORS_HPP_
