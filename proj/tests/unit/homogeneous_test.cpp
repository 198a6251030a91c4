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

#include <cmath>

#include <gtest/gtest.h>

#include "mfgmajor/kernels.hpp"
#include "mfgmajor/oracle.hpp"
#include "mfgmajor/stats.hpp"
#include "mfgmajor/tracking.hpp"
#include "oracles.hpp"

namespace mfgmajor {
namespace {

using testing::MaxAbsDiff;
using testing::Quiet;

TEST(Tracking, MatchesShootingOracle) {
  const MarketParams p;
  const TimeGrid g(24.0, 96);
  for (double rate : {0.0, 1.0}) {
    const ScalarKernel kernel = MakeScalarKernel(p.liquidity, g, rate);
    TrackingProblem prob;
    prob.penalty = 100.0;
    prob.target_weight = 100.0;
    prob.forcing.resize(96);
    for (int k = 0; k < 96; ++k) prob.forcing[k] = 40.0 * kernel.step_integral[k];
    prob.forcing_outlook.assign(97, 0.0);
    for (int k = 0; k < 96; ++k) prob.forcing_outlook[0] += kernel.horizon_decay[k] * prob.forcing[k];
    std::fill(prob.forcing_outlook.begin(), prob.forcing_outlook.end(), prob.forcing_outlook[0]);
    prob.target.assign(97, 250.0);
    const TrackingSolution sol = SolveTracking(kernel, prob);
    const ScalarBvpSolution oracle = ScalarTrackingBvp(
        p.liquidity, g, rate, [](double, int) { return 40.0; }, 100.0, 100.0, 250.0);
    EXPECT_LE(MaxAbsDiff(sol.phi, oracle.phi), 1e-6) << "rate " << rate;
    EXPECT_NEAR(sol.Y.back(), oracle.Y, 1e-6 * std::abs(oracle.Y));
  }
}

TEST(IProcess, ZeroPriceGivesZero) {
  MarketParams p = Quiet();
  p.S0 = 0.0;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 0, 1);
  const auto [I, It] = IProcess(s, p);
  for (int k = 0; k <= 96; ++k) {
    EXPECT_EQ(I[k], 0.0);
    EXPECT_EQ(It[k], 0.0);
  }
}

TEST(IProcess, ConstantPriceOutlookIsConstant) {
  const MarketParams p = Quiet();
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 0, 1);
  const auto [I, It] = IProcess(s, p);
  const double expected = p.S0 * Delta(0.0, 24.0, p);
  for (int k = 0; k <= 96; ++k) EXPECT_NEAR(It[k], expected, 1e-10 * expected);
}

TEST(IProcess, OutlookIsMartingale) {
  const MarketParams p;
  const TimeGrid g(24.0, 24);
  const Ensemble e(p, g, 0, 10000, 4242);
  MartingaleResidualTest test({"I_tilde"});
  for (int r = 0; r < e.size(); ++r) {
    const ScenarioPath s = e[r];
    test.Add(s, {IProcess(s, p).second});
  }
  const MartingaleReport rep = test.Finish();
  EXPECT_TRUE(rep.pass);
}

TEST(Homogeneous, ZeroDataGivesZero) {
  MarketParams p = Quiet();
  p.S0 = 0.0;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 1, 1);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
  for (int k = 0; k <= 96; ++k) {
    EXPECT_EQ(eq.phi_star[k], 0.0);
    EXPECT_EQ(eq.price[k], 0.0);
  }
}

TEST(Homogeneous, PriceIdentityExact) {
  const MarketParams p;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 1, 17);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
  for (int k = 0; k <= 96; ++k) EXPECT_EQ(eq.price[k], s.S[k] + p.a * eq.phi_bar[k]);
}

TEST(Homogeneous, NoPenaltyIsMinusI) {
  MarketParams p;
  p.lambda = 0.0;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 1, 23);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
  for (int k = 0; k <= 96; ++k) {
    EXPECT_NEAR(eq.phi_star[k], -eq.I[k], 1e-9 * (1.0 + std::abs(eq.I[k])));
    EXPECT_NEAR(eq.price[k], s.S[k] - p.a * eq.I[k], 1e-9 * (1.0 + std::abs(s.S[k])));
  }
}

TEST(Homogeneous, NoIdiosyncraticForecastGivesMeanField) {
  const MarketParams p;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 0, 5);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p);
  EXPECT_EQ(eq.phi_star, eq.phi_bar);
}

TEST(Homogeneous, DeterministicMatchesOracle) {
  MarketParams p = Quiet();
  p.Xbar0 = 300.0;
  const TimeGrid g(24.0, 96);
  const ScenarioPath s = Simulate(p, g, 0, 1);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p);
  const BvpSolution bvp = DeterministicBvp(p, g, s.S, s.X0.back(), s.Xbar.back());
  std::vector<double> phibar;
  for (const auto& st : bvp.path) phibar.push_back(st.Xi(2));
  EXPECT_LE(MaxAbsDiff(eq.phi_bar, phibar), 1e-6);
}

TEST(Homogeneous, TerminalIdentityExact) {
  const MarketParams p;
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 96), 1, 29);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
  const double Y = eq.Ybar.back() + eq.Ycheck.back();
  const double expected = p.lambda * (eq.phi_star.back() - s.X(0).back());
  EXPECT_NEAR(Y, expected, 1e-9 * (1.0 + std::abs(expected)));
}

double FocResidual(int n) {
  MarketParams p = Quiet();
  p.Xbar0 = 300.0;
  p.Xcheck0 = 50.0;
  const TimeGrid g(24.0, n);
  const ScenarioPath s = Simulate(p, g, 1, 1);
  const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double rate = (eq.phi_star[k + 1] - eq.phi_star[k]) / g.dt();
    const double r = p.liquidity.alpha(g.t(k)) * rate + s.S[k + 1] + p.a * eq.phi_bar[k] +
                     eq.Ybar[k + 1] + eq.Ycheck[k + 1];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

TEST(Homogeneous, FirstOrderConditionResidualIsFirstOrder) {
  const double r96 = FocResidual(96), r192 = FocResidual(192);
  EXPECT_GT(r96 / r192, 1.6);
  EXPECT_LT(r96 / r192, 2.4);
}

TEST(Homogeneous, AdjointsAreMartingales) {
  const MarketParams p;
  const TimeGrid g(24.0, 24);
  const Ensemble e(p, g, 1, 10000, 777);
  MartingaleResidualTest test({"Ybar", "Ycheck"});
  for (int r = 0; r < e.size(); ++r) {
    const ScenarioPath s = e[r];
    const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
    test.Add(s, {eq.Ybar, eq.Ycheck});
  }
  EXPECT_TRUE(test.Finish().pass);
}

TEST(Homogeneous, TerminalTrackingImprovesWithPenalty) {
  const TimeGrid g(24.0, 96);
  double previous = INFINITY;
  for (double lambda : {1e2, 1e4, 1e6}) {
    MarketParams p;
    p.lambda = lambda;
    const Ensemble e(p, g, 1, 1000, 99);
    std::vector<double> sq;
    for (int r = 0; r < e.size(); ++r) {
      const ScenarioPath s = e[r];
      const HomogeneousEquilibrium eq = SolveHomogeneous(s, p, 0);
      const double gap = eq.phi_star.back() - s.X(0).back();
      sq.push_back(gap * gap);
    }
    const double m = EstimateMean(sq).mean;
    EXPECT_LT(m, previous) << "lambda " << lambda;
    previous = m;
  }
  EXPECT_LT(previous, 1e-3);
}

}  // namespace
}  // namespace mfgmajor
