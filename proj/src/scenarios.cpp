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

#include "mfgmajor/scenarios.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/rng.hpp"

namespace mfgmajor {
namespace {

std::vector<double> BrownianPath(double start, double sigma, const TimeGrid& grid,
                                 std::uint64_t seed, std::uint64_t stream) {
  std::vector<double> path(grid.n_points());
  path[0] = start;
  if (sigma == 0.0) {
    std::fill(path.begin(), path.end(), start);
    return path;
  }
  NormalStream normal(seed, stream);
  const double scale = sigma * std::sqrt(grid.dt());
  for (int k = 0; k < grid.n_steps(); ++k) {
    path[k + 1] = path[k] + scale * normal.Next();
  }
  return path;
}

}  // namespace

std::vector<double> ScenarioPath::X(int i) const {
  std::vector<double> out(Xbar);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += Xcheck.at(i)[k];
  return out;
}

void ScenarioPath::Validate() const {
  const std::size_t n = grid.n_points();
  auto check = [n](const std::vector<double>& v, const std::string& name) {
    if (v.size() != n) {
      throw DomainError(fmt::format("scenario path {} has {} points, grid has {}", name,
                                    v.size(), n));
    }
  };
  check(S, "S");
  check(Xbar, "Xbar");
  check(X0, "X0");
  for (std::size_t i = 0; i < Xcheck.size(); ++i) {
    check(Xcheck[i], fmt::format("Xcheck_{}", i + 1));
  }
  if (!S_mean.empty()) check(S_mean, "S_mean");
}

ScenarioPath Simulate(const MarketParams& params, const TimeGrid& grid, int n_minor,
                      std::uint64_t seed) {
  if (n_minor < 0) {
    throw DomainError(fmt::format("n_minor must be non-negative (got {})", n_minor));
  }
  for (double v : {params.sigma_S, params.sigma_bar, params.sigma_0, params.sigma_X}) {
    if (!(v >= 0.0)) throw DomainError("volatilities must be non-negative");
  }
  ScenarioPath s(grid);
  s.S = BrownianPath(params.S0, params.sigma_S, grid, seed, kPriceDriver);
  s.Xbar = BrownianPath(params.Xbar0, params.sigma_bar, grid, seed, kCommonDriver);
  s.X0 = BrownianPath(params.X0_0, params.sigma_0, grid, seed, kMajorDriver);
  s.Xcheck.reserve(n_minor);
  for (int i = 0; i < n_minor; ++i) {
    s.Xcheck.push_back(BrownianPath(params.Xcheck0, params.sigma_X, grid, seed,
                                    kIdiosyncraticDriver + i));
  }
  return s;
}

void ApplyPriceDrift(ScenarioPath* scenario, const std::vector<double>& mean) {
  if (mean.size() != scenario->S.size()) {
    throw DomainError("price drift must have one value per grid point");
  }
  if (mean[0] != scenario->S[0]) {
    throw DomainError("price drift must start at the initial price");
  }
  for (std::size_t k = 0; k < mean.size(); ++k) scenario->S[k] += mean[k] - mean[0];
  scenario->S_mean = mean;
}

Ensemble::Ensemble(const MarketParams& params, const TimeGrid& grid, int n_minor,
                   int n_sim, std::uint64_t base_seed)
    : params_(params), grid_(grid), n_minor_(n_minor), n_sim_(n_sim),
      base_seed_(base_seed) {
  if (n_sim < 1) throw DomainError(fmt::format("n_sim must be >= 1 (got {})", n_sim));
}

ScenarioPath Ensemble::operator[](int k) const {
  return Simulate(params_, grid_, n_minor_, ScenarioSeed(base_seed_, k));
}

void WriteScenarioCsv(std::ostream& out, const ScenarioPath& s) {
  std::vector<std::string> header = {"t", "S", "Xbar", "X0"};
  for (int i = 0; i < s.n_minor(); ++i) header.push_back(fmt::format("Xcheck_{}", i + 1));
  WriteCsvRow(out, header);
  std::vector<double> row;
  for (int k = 0; k < s.grid.n_points(); ++k) {
    row = {s.grid.t(k), s.S[k], s.Xbar[k], s.X0[k]};
    for (const auto& x : s.Xcheck) row.push_back(x[k]);
    WriteCsvRow(out, row);
  }
}

ScenarioPath ReadScenarioCsv(std::istream& in) {
  const CsvTable table = ReadCsv(in);
  const std::vector<double> t = table.ColumnValues("t");
  if (t.size() < 3) throw DomainError("scenario CSV needs at least 3 rows");
  const int n_steps = static_cast<int>(t.size()) - 1;
  const TimeGrid grid(t.back(), n_steps);
  for (int k = 0; k <= n_steps; ++k) {
    if (std::abs(t[k] - grid.t(k)) > 1e-9 * grid.horizon()) {
      throw DomainError(fmt::format("scenario CSV times are not uniform (row {})", k + 1));
    }
  }
  ScenarioPath s(grid);
  s.S = table.ColumnValues("S");
  s.Xbar = table.ColumnValues("Xbar");
  s.X0 = table.ColumnValues("X0");
  for (int i = 1;; ++i) {
    const std::string name = fmt::format("Xcheck_{}", i);
    bool found = false;
    for (const auto& h : table.header) found = found || h == name;
    if (!found) break;
    s.Xcheck.push_back(table.ColumnValues(name));
  }
  return s;
}

}  // namespace mfgmajor
