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

#include "mfgmajor/homogeneous.hpp"

#include <ostream>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/tracking.hpp"

namespace mfgmajor {

std::pair<std::vector<double>, std::vector<double>> IProcess(
    const ScenarioPath& scenario, const MarketParams& params) {
  scenario.Validate();
  const ScalarKernel kernel =
      MakeScalarKernel(params.liquidity, scenario.grid, params.a);
  const int n = scenario.grid.n_steps();
  std::vector<double> I(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    I[k + 1] = kernel.step_decay[k] * I[k] + kernel.step_integral[k] * scenario.S[k + 1];
  }
  return {I, PriceOutlook(kernel, scenario)};
}

HomogeneousEquilibrium SolveHomogeneous(const ScenarioPath& scenario,
                                        const MarketParams& params,
                                        std::optional<int> agent) {
  scenario.Validate();
  MarketParams p = params;
  p.a0 = 0.0;
  p.Validate();
  const TimeGrid& grid = scenario.grid;
  const int n = grid.n_steps();

  HomogeneousEquilibrium eq(grid);
  std::tie(eq.I, eq.I_tilde) = IProcess(scenario, p);

  const ScalarKernel kernel = MakeScalarKernel(p.liquidity, grid, p.a);
  TrackingProblem mean_field;
  mean_field.penalty = p.lambda;
  mean_field.target_weight = p.lambda;
  mean_field.forcing = PriceForcing(kernel, scenario);
  mean_field.forcing_outlook = eq.I_tilde;
  mean_field.target = scenario.Xbar;
  const TrackingSolution bar = SolveTracking(kernel, mean_field);
  eq.phi_bar = bar.phi;
  eq.Ybar = bar.Y;

  TrackingProblem individual;
  individual.penalty = p.lambda;
  individual.target_weight = p.lambda;
  if (agent) {
    if (*agent < 0 || *agent >= scenario.n_minor()) {
      throw DomainError("agent index outside the scenario's minor population");
    }
    individual.target = scenario.Xcheck[*agent];
  } else {
    individual.target.assign(n + 1, p.Xcheck0);
  }
  const TrackingSolution check =
      SolveTracking(MakeScalarKernel(p.liquidity, grid, 0.0), individual);
  eq.Ycheck = check.Y;

  eq.phi_star.resize(n + 1);
  eq.price.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    eq.phi_star[k] = eq.phi_bar[k] + check.phi[k];
    eq.price[k] = scenario.S[k] + p.a * eq.phi_bar[k];
  }
  return eq;
}

void WriteHomogeneousCsv(std::ostream& out, const HomogeneousEquilibrium& eq) {
  WriteCsvRow(out, std::vector<std::string>{"t", "phi_star", "phi_bar", "price", "I",
                                            "I_tilde"});
  for (int k = 0; k < eq.grid.n_points(); ++k) {
    WriteCsvRow(out, std::vector<double>{eq.grid.t(k), eq.phi_star[k], eq.phi_bar[k],
                                         eq.price[k], eq.I[k], eq.I_tilde[k]});
  }
}

}  // namespace mfgmajor
