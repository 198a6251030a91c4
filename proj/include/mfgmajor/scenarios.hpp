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

#ifndef MFGMAJOR_SCENARIOS_HPP_
#define MFGMAJOR_SCENARIOS_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mfgmajor/grid.hpp"
#include "mfgmajor/params.hpp"

namespace mfgmajor {

// Noise drivers; minor agent i uses stream kIdiosyncratic + i.
enum Driver : std::uint64_t {
  kPriceDriver = 0,
  kCommonDriver = 1,
  kMajorDriver = 2,
  kIdiosyncraticDriver = 3,
};

// One joint realization of the price and forecasts on a grid.
struct ScenarioPath {
  explicit ScenarioPath(const TimeGrid& g) : grid(g) {}

  TimeGrid grid;
  std::vector<double> S;
  std::vector<double> Xbar;
  std::vector<double> X0;
  std::vector<std::vector<double>> Xcheck;
  // Deterministic mean of S on the grid. Empty means S is a martingale.
  std::vector<double> S_mean;

  int n_minor() const { return static_cast<int>(Xcheck.size()); }
  // Total forecast Xbar + Xcheck[i] of minor agent i.
  std::vector<double> X(int i) const;
  // E[S_j | F_k] for j >= k.
  double ExpectedPrice(int j, int k) const {
    return S_mean.empty() ? S[k] : S_mean[j] + (S[k] - S_mean[k]);
  }
  // Throws DomainError if the path lengths do not match the grid.
  void Validate() const;
};

ScenarioPath Simulate(const MarketParams& params, const TimeGrid& grid,
                      int n_minor, std::uint64_t seed);

// Adds the deterministic drift mean[k] - mean[0] to S and records the mean.
// mean[0] must equal S[0].
void ApplyPriceDrift(ScenarioPath* scenario, const std::vector<double>& mean);

// Scenarios k = 0..n_sim-1 with seeds base_seed ^ k, generated on demand.
class Ensemble {
 public:
  Ensemble(const MarketParams& params, const TimeGrid& grid, int n_minor,
           int n_sim, std::uint64_t base_seed);

  int size() const { return n_sim_; }
  const TimeGrid& grid() const { return grid_; }
  int n_minor() const { return n_minor_; }
  std::uint64_t base_seed() const { return base_seed_; }
  ScenarioPath operator[](int k) const;

 private:
  MarketParams params_;
  TimeGrid grid_;
  int n_minor_;
  int n_sim_;
  std::uint64_t base_seed_;
};

// Columns t,S,Xbar,X0,Xcheck_1..Xcheck_N.
void WriteScenarioCsv(std::ostream& out, const ScenarioPath& scenario);
// Inverse of WriteScenarioCsv; the grid is inferred from the t column.
ScenarioPath ReadScenarioCsv(std::istream& in);

}  // namespace mfgmajor

#endif  // MFGMAJOR_SCENARIOS_HPP_
