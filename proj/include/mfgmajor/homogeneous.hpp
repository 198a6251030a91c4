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

#ifndef MFGMAJOR_HOMOGENEOUS_HPP_
#define MFGMAJOR_HOMOGENEOUS_HPP_

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "mfgmajor/grid.hpp"
#include "mfgmajor/params.hpp"
#include "mfgmajor/scenarios.hpp"

namespace mfgmajor {

// Mean field equilibrium with identical agents and no major player.
struct HomogeneousEquilibrium {
  explicit HomogeneousEquilibrium(const TimeGrid& g) : grid(g) {}

  TimeGrid grid;
  std::vector<double> phi_star;
  std::vector<double> phi_bar;
  std::vector<double> price;
  std::vector<double> I;
  std::vector<double> I_tilde;
  // Martingales driving phi_bar and the idiosyncratic part of phi_star.
  std::vector<double> Ybar;
  std::vector<double> Ycheck;
};

// I_t and I~_t = E[int_0^T eta(s,T)/alpha(s) S_s ds | F_t]. On each cell the
// price is frozen at its right end value and the kernels are integrated
// exactly.
std::pair<std::vector<double>, std::vector<double>> IProcess(
    const ScenarioPath& scenario, const MarketParams& params);

// a0 is ignored. `agent` selects Xcheck[agent] for the individual terms;
// nullopt uses a zero idiosyncratic forecast.
HomogeneousEquilibrium SolveHomogeneous(const ScenarioPath& scenario,
                                        const MarketParams& params,
                                        std::optional<int> agent = std::nullopt);

// Columns t,phi_star,phi_bar,price,I,I_tilde.
void WriteHomogeneousCsv(std::ostream& out, const HomogeneousEquilibrium& eq);

}  // namespace mfgmajor

#endif  // MFGMAJOR_HOMOGENEOUS_HPP_
