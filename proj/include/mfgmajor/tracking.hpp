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

#ifndef MFGMAJOR_TRACKING_HPP_
#define MFGMAJOR_TRACKING_HPP_

#include <functional>
#include <vector>

#include "mfgmajor/grid.hpp"
#include "mfgmajor/params.hpp"
#include "mfgmajor/scenarios.hpp"

namespace mfgmajor {

// Scalar kernels for the tracking problem
//   alpha(t) phi' + rate * phi = -(p + Y),  Y martingale,
//   Y_T = penalty * phi_T - target_weight * X_T + m_T,
// with Y frozen at Y_{k+1} on cell k.
struct ScalarKernel {
  double rate = 0.0;
  std::vector<double> step_decay;     // Decay(t_k, t_{k+1})
  std::vector<double> step_integral;  // DecayIntegral(t_k, t_{k+1})
  std::vector<double> horizon_decay;  // Decay(t_{k+1}, T)
  std::vector<double> weight;         // horizon_decay * step_integral
  std::vector<double> tail;           // DecayIntegral(t_k, T), n + 1 entries
  double total_decay = 1.0;           // Decay(0, T)
};

ScalarKernel MakeScalarKernel(const LiquiditySchedule& liquidity,
                              const TimeGrid& grid, double rate);

struct TrackingProblem {
  double penalty = 0.0;
  double target_weight = 0.0;
  double phi_initial = 0.0;
  // Cell forcing F_k = int_{t_k}^{t_{k+1}} Decay(u, t_{k+1}) p(u)/alpha(u) du,
  // k < n. Empty means zero.
  std::vector<double> forcing;
  // V_k = sum_{j<k} h_j F_j + sum_{j>=k} h_j E[F_j | F_k] with
  // h_j = horizon_decay[j], n + 1 entries. Empty means zero.
  std::vector<double> forcing_outlook;
  // Martingale target X_k; empty means zero.
  std::vector<double> target;
  // E[m_T | F_k]; empty means zero.
  std::vector<double> terminal_shift;
};

struct TrackingSolution {
  std::vector<double> phi;  // n + 1 entries
  std::vector<double> Y;    // n + 1 entries
};

TrackingSolution SolveTracking(const ScalarKernel& kernel,
                               const TrackingProblem& problem);

// V_k for a forcing whose conditional expectations are given by
// expect(j, k) = E[F_j | F_k] (j >= k). O(n^2).
std::vector<double> ForcingOutlook(
    const ScalarKernel& kernel, const std::vector<double>& forcing,
    const std::function<double(int j, int k)>& expect);

// Forcing of a price frozen at S_{k+1} on cell k.
std::vector<double> PriceForcing(const ScalarKernel& kernel,
                                 const ScenarioPath& scenario);
// Matching outlook V_k. O(n).
std::vector<double> PriceOutlook(const ScalarKernel& kernel,
                                 const ScenarioPath& scenario);

}  // namespace mfgmajor

#endif  // MFGMAJOR_TRACKING_HPP_
