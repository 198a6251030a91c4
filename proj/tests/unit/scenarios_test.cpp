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
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mfgmajor/errors.hpp"
#include "mfgmajor/rng.hpp"
#include "mfgmajor/stats.hpp"
#include "oracles.hpp"

namespace mfgmajor {
namespace {

TEST(TimeGrid, PointsAndSpacing) {
  const TimeGrid g(24.0, 96);
  EXPECT_EQ(g.n_points(), 97);
  EXPECT_DOUBLE_EQ(g.dt(), 0.25);
  EXPECT_EQ(g.t(0), 0.0);
  EXPECT_EQ(g.t(96), 24.0);
  EXPECT_EQ(g.times().size(), 97u);
  EXPECT_THROW(TimeGrid(24.0, 0), DomainError);
  EXPECT_THROW(TimeGrid(-1.0, 4), DomainError);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  NormalStream a(7, 1), b(7, 1), c(7, 2), d(8, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.Next();
    EXPECT_EQ(x, b.Next());
    EXPECT_NE(x, c.Next());
    EXPECT_NE(x, d.Next());
  }
  EXPECT_EQ(ScenarioSeed(100, 0), 100u);
}

TEST(Rng, StandardNormalMoments) {
  NormalStream s(20260101, 0);
  std::vector<double> x(200000);
  for (double& v : x) v = s.Next();
  const MeanEstimate m = EstimateMean(x);
  EXPECT_LT(std::abs(m.mean), 3.0 * m.se);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  const MeanEstimate v = EstimateMean(sq);
  EXPECT_LT(std::abs(v.mean - 1.0), 3.0 * v.se);
}

TEST(Scenario, ZeroVolatilityIsConstant) {
  MarketParams p = testing::Quiet();
  p.Xbar0 = 5.0;
  p.X0_0 = -3.0;
  p.Xcheck0 = 2.0;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 3, 11);
  for (int k = 0; k <= 96; ++k) {
    EXPECT_EQ(s.S[k], 40.0);
    EXPECT_EQ(s.Xbar[k], 5.0);
    EXPECT_EQ(s.X0[k], -3.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s.Xcheck[i][k], 2.0);
  }
}

TEST(Scenario, SameSeedBitIdentical) {
  const MarketParams p;
  const TimeGrid g(24.0, 96);
  const ScenarioPath a = Simulate(p, g, 4, 99), b = Simulate(p, g, 4, 99);
  EXPECT_EQ(a.S, b.S);
  EXPECT_EQ(a.Xbar, b.Xbar);
  EXPECT_EQ(a.X0, b.X0);
  EXPECT_EQ(a.Xcheck, b.Xcheck);
}

TEST(Scenario, DriversAreIndependentStreams) {
  const ScenarioPath s = Simulate(MarketParams(), TimeGrid(24.0, 96), 2, 5);
  EXPECT_NE(s.Xbar, s.X0);
  EXPECT_NE(s.Xcheck[0], s.Xcheck[1]);
  const std::vector<double> x = s.X(1);
  for (int k = 0; k <= 96; ++k) EXPECT_EQ(x[k], s.Xbar[k] + s.Xcheck[1][k]);
}

TEST(Scenario, TerminalVarianceMatchesLaw) {
  MarketParams p;
  p.liquidity.horizon = 1.0;
  const TimeGrid g(1.0, 4);
  std::vector<double> sq;
  sq.reserve(100000);
  for (int r = 0; r < 100000; ++r) {
    const double x = Simulate(p, g, 0, ScenarioSeed(314, r)).Xbar.back();
    sq.push_back(x * x);
  }
  const MeanEstimate v = EstimateMean(sq);
  EXPECT_LT(std::abs(v.mean - 73.0 * 73.0), 3.0 * v.se) << v.mean << " +- " << v.se;
}

TEST(Ensemble, SingleScenarioIsSimulateWithBaseSeed) {
  const MarketParams p;
  const TimeGrid g(24.0, 48);
  const Ensemble e(p, g, 2, 1, 1234);
  const ScenarioPath a = e[0], b = Simulate(p, g, 2, 1234);
  EXPECT_EQ(a.S, b.S);
  EXPECT_EQ(a.Xcheck, b.Xcheck);
  EXPECT_THROW(Ensemble(p, g, 0, 0, 1), DomainError);
}

TEST(Ensemble, DistinctScenarios) {
  const Ensemble e(MarketParams(), TimeGrid(24.0, 24), 0, 500, 77);
  std::set<double> terminal;
  for (int r = 0; r < e.size(); ++r) terminal.insert(e[r].S.back());
  EXPECT_EQ(terminal.size(), 500u);
}

TEST(Ensemble, PriceMeanAndMartingaleRegressions) {
  const MarketParams p;
  const TimeGrid g(24.0, 24);
  const Ensemble e(p, g, 1, 10000, 20260101);
  std::vector<double> terminal;
  // Pooled regression of increments on (1, current value) per driver.
  std::vector<std::vector<double>> x(4), y(4);
  for (int r = 0; r < e.size(); ++r) {
    const ScenarioPath s = e[r];
    terminal.push_back(s.S.back());
    const std::vector<double>* paths[4] = {&s.S, &s.Xbar, &s.X0, &s.Xcheck[0]};
    for (int d = 0; d < 4; ++d) {
      const auto& v = *paths[d];
      for (int k = 0; k < g.n_steps(); k += 6) {
        x[d].push_back(1.0);
        x[d].push_back(v[k]);
        y[d].push_back(v[k + 1] - v[k]);
      }
    }
  }
  const MeanEstimate m = EstimateMean(terminal);
  EXPECT_LT(std::abs(m.mean - 40.0), 3.0 * m.se);
  for (int d = 0; d < 4; ++d) {
    const RegressionResult fit = RobustOls(x[d], 2, y[d]);
    for (int c = 0; c < 2; ++c) {
      EXPECT_LT(std::abs(fit.coef[c]), 3.0 * fit.se[c]) << "driver " << d << " coef " << c;
    }
  }
}

TEST(Scenario, TerminalLawIndependentOfGrid) {
  const MarketParams p;
  std::vector<double> coarse, fine;
  const TimeGrid g8(24.0, 8), g64(24.0, 64);
  for (int r = 0; r < 10000; ++r) {
    coarse.push_back(Simulate(p, g8, 0, ScenarioSeed(1, r)).X0.back());
    fine.push_back(Simulate(p, g64, 0, ScenarioSeed(1u << 20, r)).X0.back());
  }
  EXPECT_GT(testing::KsPValue(coarse, fine), 0.01);
}

TEST(Scenario, CsvRoundTripIsExact) {
  const ScenarioPath s = Simulate(MarketParams(), TimeGrid(24.0, 96), 2, 3);
  std::stringstream buf;
  WriteScenarioCsv(buf, s);
  const ScenarioPath r = ReadScenarioCsv(buf);
  EXPECT_TRUE(r.grid == s.grid);
  EXPECT_EQ(r.S, s.S);
  EXPECT_EQ(r.Xbar, s.Xbar);
  EXPECT_EQ(r.X0, s.X0);
  EXPECT_EQ(r.Xcheck, s.Xcheck);
}

TEST(Scenario, CsvRejectsUnevenTimes) {
  std::stringstream buf("t,S,Xbar,X0\n0,40,0,0\n1,40,0,0\n3,40,0,0\n");
  EXPECT_THROW(ReadScenarioCsv(buf), DomainError);
}

TEST(Scenario, PriceDrift) {
  ScenarioPath s = Simulate(testing::Quiet(), TimeGrid(24.0, 4), 0, 1);
  ApplyPriceDrift(&s, {40, 41, 42, 43, 44});
  EXPECT_EQ(s.S.back(), 44.0);
  EXPECT_DOUBLE_EQ(s.ExpectedPrice(4, 1), 44.0);
  EXPECT_THROW(ApplyPriceDrift(&s, {39, 41, 42, 43, 44}), DomainError);
}

TEST(Stats, MeanAndStandardError) {
  const MeanEstimate m = EstimateMean({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(m.count, 4u);
}

TEST(Stats, LineFitAndRankDeficiency) {
  const LineFit f = FitLine({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_THROW(RobustOls({1, 1, 1, 1, 1, 1}, 2, {1, 2, 3}), SingularMatrixError);
}

}  // namespace
}  // namespace mfgmajor
