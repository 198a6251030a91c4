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

#ifndef MFGMAJOR_STATS_HPP_
#define MFGMAJOR_STATS_HPP_

#include <cstddef>
#include <vector>

namespace mfgmajor {

// Sample mean and standard error of the mean.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

// Two-pass mean/SE over a sample, summed in index order.
MeanEstimate EstimateMean(const std::vector<double>& sample);

// Ordinary least squares with heteroskedasticity-robust (HC0) standard
// errors. `x` holds the regressors row-major, `p` per row. Throws
// SingularMatrixError when the design is rank deficient.
struct RegressionResult {
  std::vector<double> coef;
  std::vector<double> se;
};
RegressionResult RobustOls(const std::vector<double>& x, int p,
                           const std::vector<double>& y);

// Least squares line y = c0 + c1 x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mfgmajor

#endif  // MFGMAJOR_STATS_HPP_
