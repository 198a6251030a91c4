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

#include "mfgmajor/oracle.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mfgmajor/errors.hpp"
#include "mfgmajor/homogeneous.hpp"
#include "mfgmajor/rng.hpp"
#include "oracles.hpp"

namespace mfgmajor {
namespace {

using testing::MaxAbsDiff;
using testing::Quiet;

MarketParams Shared() {
  MarketParams p;
  p.a0 = 0.5;
  p.a = 0.5;
  return p;
}

TEST(DeterministicBvp, ZeroDataGivesZero) {
  MarketParams p = Quiet(Shared());
  p.S0 = 0.0;
  const TimeGrid g(24.0, 48);
  const ScenarioPath s = Simulate(p, g, 0, 1);
  const BvpSolution bvp = DeterministicBvp(p, g, s.S, 0.0, 0.0, 16);
  ASSERT_EQ(bvp.path.size(), 49u);
  for (const auto& st : bvp.path) {
    EXPECT_EQ(st.Xi.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(st.Mvec.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(bvp.second_step, 0.0);
}

TEST(DeterministicBvp, SingleNewtonStepIsExact) {
  MarketParams p = Quiet(Shared());
  p.X0_0 = 200.0;
  p.Xbar0 = -150.0;
  const TimeGrid g(24.0, 96);
  const ScenarioPath s = Simulate(p, g, 0, 1);
  const BvpSolution bvp = DeterministicBvp(p, g, s.S, s.X0.back(), s.Xbar.back());
  const double scale = bvp.M_initial.cwiseAbs().maxCoeff();
  EXPECT_LE(bvp.second_step, 1e-10 * scale);
  EXPECT_LE(bvp.terminal_residual, 1e-8 * scale);
  EXPECT_EQ(bvp.path.front().Xi.cwiseAbs().maxCoeff(), 0.0);
  for (const auto& st : bvp.path) EXPECT_EQ(st.Mvec, bvp.M_initial);
}

TEST(DeterministicBvp, MatchesHomogeneousWithoutMajorImpact) {
  MarketParams p = Quiet(MarketParams());  // a0 = 0
  p.Xbar0 = 300.0;
  const TimeGrid g(24.0, 96);
  const ScenarioPath s = Simulate(p, g, 0, 1);
  const BvpSolution bvp = DeterministicBvp(p, g, s.S, s.X0.back(), s.Xbar.back());
  const HomogeneousEquilibrium h = SolveHomogeneous(s, p);
  std::vector<double> phibar;
  for (const auto& st : bvp.path) phibar.push_back(st.Xi(2));
  EXPECT_LE(MaxAbsDiff(phibar, h.phi_bar), 1e-6);
}

TEST(DeterministicBvp, RejectsMismatchedPrice) {
  const MarketParams p = Quiet(Shared());
  EXPECT_THROW(DeterministicBvp(p, TimeGrid(24.0, 8), std::vector<double>(5, 40.0), 0.0, 0.0),
               DomainError);
}

// Without penalty or target, alpha phi' = -c has the closed form
// phi(t) = -(c / slope) log(alpha(0) / alpha(t)).
TEST(ScalarTrackingBvp, ClosedFormWithoutTerminalTerms) {
  const LiquiditySchedule liq;
  const TimeGrid g(24.0, 48);
  const double c = 40.0;
  const ScalarBvpSolution sol =
      ScalarTrackingBvp(liq, g, 0.0, [&](double, int) { return c; }, 0.0, 0.0, 0.0);
  EXPECT_EQ(sol.Y, 0.0);
  for (int k = 0; k <= 48; ++k) {
    const double t = g.t(k);
    const double exact = -c / liq.alpha_slope * std::log(liq.alpha(0.0) / liq.alpha(t));
    EXPECT_NEAR(sol.phi[k], exact, 1e-8 * std::abs(exact) + 1e-10) << "t = " << t;
  }
}

TEST(ScalarTrackingBvp, TerminalIdentityHolds) {
  const LiquiditySchedule liq;
  const TimeGrid g(24.0, 48);
  const ScalarBvpSolution sol = ScalarTrackingBvp(
      liq, g, 1.0, [](double t, int) { return 40.0 + t; }, 100.0, 100.0, 250.0);
  EXPECT_NEAR(sol.Y, 100.0 * sol.phi.back() - 100.0 * 250.0, 1e-8 * std::abs(sol.Y));
  EXPECT_EQ(sol.phi.front(), 0.0);
}

class FocFixture : public ::testing::Test {
 protected:
  static const FocReport& Report(double shift) {
    static const MarketParams p = Shared();
    static const TimeGrid g(24.0, 48);
    static const StackelbergSolver solver(p, g);
    static const Ensemble ens(p, g, 1, 2000, 77);
    static const FocReport at_equilibrium = FocTest(solver, ens, 20, 0.0);
    static const FocReport shifted = FocTest(solver, ens, 20, 1.0);
    return shift == 0.0 ? at_equilibrium : shifted;
  }
};

TEST_F(FocFixture, EquilibriumPasses) {
  const FocReport& r = Report(0.0);
  ASSERT_EQ(r.statistics.size(), 20u);
  EXPECT_TRUE(r.pass);
  for (const auto& st : r.statistics) EXPECT_GT(st.se, 0.0) << st.name;
}

TEST_F(FocFixture, ResidualsAtRoundOff) {
  const FocReport& r = Report(0.0);
  EXPECT_LE(r.major_residual, 1e-9);
  EXPECT_LE(r.minor_residual, 1e-9);
  EXPECT_LE(r.terminal_residual, 1e-9);
}

TEST_F(FocFixture, ShiftedStrategyDetected) {
  const FocReport& r = Report(1.0);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.statistics.front().pass);  // constant test process
}

TEST(FocTest, NoTestProcesses) {
  const MarketParams p = Shared();
  const TimeGrid g(24.0, 24);
  const StackelbergSolver solver(p, g);
  const Ensemble ens(p, g, 0, 10, 1);
  const FocReport r = FocTest(solver, ens, 0);
  EXPECT_TRUE(r.statistics.empty());
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(FocTest(solver, ens, -1), DomainError);
  EXPECT_THROW(FocTest(solver, Ensemble(p, TimeGrid(24.0, 12), 0, 10, 1)), DomainError);
}

std::vector<double> Path(const ScenarioPath& s, double drift, std::uint64_t seed) {
  NormalStream z(seed, 3);
  std::vector<double> x(s.grid.n_points(), 0.0);
  for (int k = 0; k < s.grid.n_steps(); ++k) {
    x[k + 1] = x[k] + drift * s.grid.dt() + std::sqrt(s.grid.dt()) * z.Next();
  }
  return x;
}

TEST(MartingaleResidualTest, BrownianPassesDriftFails) {
  const MarketParams p = Shared();
  const TimeGrid g(24.0, 24);
  const Ensemble ens(p, g, 0, 2000, 9);
  MartingaleResidualTest test({"W", "D"});
  for (int r = 0; r < ens.size(); ++r) {
    const ScenarioPath s = ens[r];
    test.Add(s, {Path(s, 0.0, r), Path(s, 1.0, r + 100000)});
  }
  const MartingaleReport rep = test.Finish();
  ASSERT_EQ(rep.statistics.size(), 10u);
  for (int j = 0; j < 5; ++j) EXPECT_TRUE(rep.statistics[j].pass) << rep.statistics[j].name;
  EXPECT_EQ(rep.statistics[5].name, "D:const");
  EXPECT_FALSE(rep.statistics[5].pass);
  EXPECT_FALSE(rep.pass);
}

TEST(MartingaleResidualTest, RejectsMalformedPaths) {
  const MarketParams p = Shared();
  const ScenarioPath s = Simulate(p, TimeGrid(24.0, 24), 0, 1);
  MartingaleResidualTest test({"A"});
  EXPECT_THROW(test.Add(s, {}), DomainError);
  EXPECT_THROW(test.Add(s, {std::vector<double>(3, 0.0)}), DomainError);
}

TEST(OracleCsv, Schema) {
  FocReport r;
  r.statistics.push_back({"P0(t)*1", 0.5, 0.25, true});
  std::stringstream out;
  WriteFocCsv(out, r);
  EXPECT_EQ(out.str(), "name,estimate,se,pass\nP0(t)*1,0.5,0.25,1\n");
}

}  // namespace
}  // namespace mfgmajor
