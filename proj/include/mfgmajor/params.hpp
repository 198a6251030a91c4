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

#ifndef MFGMAJOR_PARAMS_HPP_
#define MFGMAJOR_PARAMS_HPP_

#include <optional>

namespace mfgmajor {

// Affine liquidity schedules alpha(t) = slope (T - t) + intercept.
struct LiquiditySchedule {
  double alpha_slope = 0.3;
  double alpha_intercept = 0.1;
  double alpha0_slope = 0.3;
  double alpha0_intercept = 0.1;
  double horizon = 24.0;

  double alpha(double t) const {
    return alpha_slope * (horizon - t) + alpha_intercept;
  }
  double alpha0(double t) const {
    return alpha0_slope * (horizon - t) + alpha0_intercept;
  }

  // Throws DomainError unless both schedules are strictly positive on
  // [0, horizon].
  void Validate() const;

  // Returns c when alpha0 = c * alpha (relative tolerance 1e-12 on slope and
  // intercept ratios), nullopt otherwise.
  std::optional<double> Proportionality() const;
};

struct MarketParams {
  double a = 1.0;
  double a0 = 0.0;
  double lambda = 100.0;
  double lambda0 = 100.0;
  LiquiditySchedule liquidity;
  double S0 = 40.0;
  double sigma_S = 10.0;
  double Xbar0 = 0.0;
  double sigma_bar = 73.0;
  double sigma_0 = 73.0;
  double sigma_X = 73.0;
  double X0_0 = 0.0;
  double Xcheck0 = 0.0;

  double horizon() const { return liquidity.horizon; }

  // Throws DomainError naming the first violated constraint.
  void Validate() const;
};

}  // namespace mfgmajor

#endif  // MFGMAJOR_PARAMS_HPP_
