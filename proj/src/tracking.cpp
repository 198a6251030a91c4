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

#include "mfgmajor/tracking.hpp"

#include <fmt/format.h>

#include "mfgmajor/errors.hpp"
#include "mfgmajor/kernels.hpp"

namespace mfgmajor {
namespace {

double At(const std::vector<double>& v, int k) { return v.empty() ? 0.0 : v[k]; }

void CheckLength(const std::vector<double>& v, std::size_t n, const char* name) {
  if (!v.empty() && v.size() != n) {
    throw DomainError(fmt::format("tracking input {} has {} entries, expected {}", name,
                                  v.size(), n));
  }
}

}  // namespace

ScalarKernel MakeScalarKernel(const LiquiditySchedule& liquidity, const TimeGrid& grid,
                              double rate) {
  liquidity.Validate();
  const int n = grid.n_steps();
  const double T = grid.horizon();
  ScalarKernel k;
  k.rate = rate;
  k.step_decay.resize(n);
  k.step_integral.resize(n);
  k.horizon_decay.resize(n);
  k.weight.resize(n);
  k.tail.resize(n + 1);
  for (int j = 0; j < n; ++j) {
    k.step_decay[j] = Decay(grid.t(j), grid.t(j + 1), rate, liquidity);
    k.step_integral[j] = DecayIntegral(grid.t(j), grid.t(j + 1), rate, liquidity);
    k.horizon_decay[j] = Decay(grid.t(j + 1), T, rate, liquidity);
    k.weight[j] = k.horizon_decay[j] * k.step_integral[j];
    k.tail[j] = DecayIntegral(grid.t(j), T, rate, liquidity);
  }
  k.tail[n] = 0.0;
  k.total_decay = Decay(0.0, T, rate, liquidity);
  return k;
}

TrackingSolution SolveTracking(const ScalarKernel& kernel, const TrackingProblem& pb) {
  const int n = static_cast<int>(kernel.step_decay.size());
  CheckLength(pb.forcing, n, "forcing");
  CheckLength(pb.forcing_outlook, n + 1, "forcing_outlook");
  CheckLength(pb.target, n + 1, "target");
  CheckLength(pb.terminal_shift, n + 1, "terminal_shift");
  const double q = pb.penalty;
  const double lam = pb.target_weight;

  TrackingSolution sol;
  sol.phi.resize(n + 1);
  sol.Y.resize(n + 1);
  sol.Y[0] = (q * (kernel.total_decay * pb.phi_initial - At(pb.forcing_outlook, 0)) -
              lam * At(pb.target, 0) + At(pb.terminal_shift, 0)) /
             (1.0 + q * kernel.tail[0]);
  for (int k = 0; k < n; ++k) {
    const double dv = At(pb.forcing_outlook, k + 1) - At(pb.forcing_outlook, k);
    const double dx = At(pb.target, k + 1) - At(pb.target, k);
    const double dm = At(pb.terminal_shift, k + 1) - At(pb.terminal_shift, k);
    sol.Y[k + 1] = sol.Y[k] + (-q * dv - lam * dx + dm) / (1.0 + q * kernel.tail[k]);
  }
  sol.phi[0] = pb.phi_initial;
  for (int k = 0; k < n; ++k) {
    sol.phi[k + 1] = kernel.step_decay[k] * sol.phi[k] - At(pb.forcing, k) -
                     kernel.step_integral[k] * sol.Y[k + 1];
  }
  return sol;
}

std::vector<double> ForcingOutlook(const ScalarKernel& kernel,
                                   const std::vector<double>& forcing,
                                   const std::function<double(int, int)>& expect) {
  const int n = static_cast<int>(kernel.weight.size());
  CheckLength(forcing, n, "forcing");
  std::vector<double> v(n + 1, 0.0);
  double past = 0.0;
  for (int k = 0; k <= n; ++k) {
    double future = 0.0;
    for (int j = k; j < n; ++j) future += kernel.horizon_decay[j] * expect(j, k);
    v[k] = past + future;
    if (k < n) past += kernel.horizon_decay[k] * forcing[k];
  }
  return v;
}

std::vector<double> PriceForcing(const ScalarKernel& kernel, const ScenarioPath& s) {
  const int n = static_cast<int>(kernel.weight.size());
  if (s.grid.n_steps() != n) throw DomainError("scenario grid does not match kernel");
  std::vector<double> f(n);
  for (int k = 0; k < n; ++k) f[k] = kernel.step_integral[k] * s.S[k + 1];
  return f;
}

std::vector<double> PriceOutlook(const ScalarKernel& kernel, const ScenarioPath& s) {
  const int n = static_cast<int>(kernel.weight.size());
  if (s.grid.n_steps() != n) throw DomainError("scenario grid does not match kernel");
  // Suffix sums of w_j m_{j+1} for the drift part.
  std::vector<double> drift_tail(n + 1, 0.0);
  if (!s.S_mean.empty()) {
    for (int j = n - 1; j >= 0; --j) {
      drift_tail[j] = drift_tail[j + 1] + kernel.weight[j] * s.S_mean[j + 1];
    }
  }
  std::vector<double> v(n + 1);
  double past = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (s.S_mean.empty()) {
      v[k] = past + kernel.tail[k] * s.S[k];
    } else {
      v[k] = past + kernel.tail[k] * (s.S[k] - s.S_mean[k]) + drift_tail[k];
    }
    if (k < n) past += kernel.weight[k] * s.S[k + 1];
  }
  return v;
}

}  // namespace mfgmajor
