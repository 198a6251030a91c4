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

#include "mfgmajor/kernels.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "mfgmajor/errors.hpp"
#include "mfgmajor/linalg.hpp"
#include "oracles.hpp"

namespace mfgmajor {
namespace {

using testing::MaxAbsDiff;

MarketParams ConstantLiquidity(double a, double a0) {
  MarketParams p;
  p.a = a;
  p.a0 = a0;
  p.liquidity.alpha_slope = 0.0;
  p.liquidity.alpha_intercept = 1.0;
  p.liquidity.alpha0_slope = 0.0;
  p.liquidity.alpha0_intercept = 1.0;
  return p;
}

TEST(Liquidity, AffineScheduleAndTerminalIntercept) {
  const LiquiditySchedule l;
  EXPECT_EQ(l.alpha(l.horizon), l.alpha_intercept);
  EXPECT_EQ(l.alpha0(l.horizon), l.alpha0_intercept);
  EXPECT_DOUBLE_EQ(l.alpha(0.0), 0.3 * 24 + 0.1);
  EXPECT_NO_THROW(l.Validate());
  ASSERT_TRUE(l.Proportionality().has_value());
  EXPECT_DOUBLE_EQ(*l.Proportionality(), 1.0);
}

TEST(Liquidity, RejectsNonPositiveSchedule) {
  LiquiditySchedule l;
  l.alpha_intercept = -0.1;
  EXPECT_THROW(l.Validate(), DomainError);
  l = LiquiditySchedule();
  l.alpha0_slope = -1.0;
  EXPECT_THROW(l.Validate(), DomainError);
}

TEST(Liquidity, ProportionalityDetectsRatio) {
  LiquiditySchedule l;
  l.alpha0_slope = 0.6;
  l.alpha0_intercept = 0.2;
  ASSERT_TRUE(l.Proportionality().has_value());
  EXPECT_NEAR(*l.Proportionality(), 2.0, 1e-15);
  l.alpha0_intercept = 0.2 * (1 + 1e-9);
  EXPECT_FALSE(l.Proportionality().has_value());
}

TEST(MarketParams, DefaultsAreTableValues) {
  const MarketParams p;
  EXPECT_EQ(p.a, 1.0);
  EXPECT_EQ(p.lambda, 100.0);
  EXPECT_EQ(p.lambda0, 100.0);
  EXPECT_EQ(p.S0, 40.0);
  EXPECT_EQ(p.sigma_S, 10.0);
  EXPECT_EQ(p.sigma_bar, 73.0);
  EXPECT_EQ(p.sigma_0, 73.0);
  EXPECT_EQ(p.sigma_X, 73.0);
  EXPECT_EQ(p.horizon(), 24.0);
  EXPECT_NO_THROW(p.Validate());
}

TEST(MarketParams, ValidateNamesViolation) {
  MarketParams p;
  p.a = 0.0;
  EXPECT_THROW(p.Validate(), DomainError);
  p = MarketParams();
  p.lambda0 = -1.0;
  EXPECT_THROW(p.Validate(), DomainError);
  p = MarketParams();
  p.sigma_X = -1.0;
  EXPECT_THROW(p.Validate(), DomainError);
}

TEST(Eta, EmptyIntervalAndZeroImpact) {
  const MarketParams p;
  for (double t : {0.0, 3.5, 24.0}) {
    EXPECT_EQ(Eta(t, t, p), 1.0);
    EXPECT_EQ(Delta(t, t, p), 0.0);
    EXPECT_EQ(DeltaTilde(t, t, p), 0.0);
  }
  MarketParams q;
  q.a = 0.0;
  EXPECT_DOUBLE_EQ(Eta(0.0, 24.0, q), 1.0);
}

TEST(Eta, ConstantLiquidityMatchesQuadrature) {
  const MarketParams p = ConstantLiquidity(1.0, 0.0);
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double u) { return p.a / p.liquidity.alpha(u); }, 0.0, 1.0);
  EXPECT_NEAR(Eta(0.0, 1.0, p), std::exp(-integral), 1e-14);
  EXPECT_NEAR(Eta(0.0, 1.0, p), 0.3678794, 1e-7);
}

TEST(Delta, ConstantLiquidityValues) {
  const MarketParams p = ConstantLiquidity(1.0, 0.0);
  EXPECT_NEAR(DeltaTilde(0.0, 2.0, p), 2.0, 1e-14);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double u) { return Eta(u, 1.0, p) / p.liquidity.alpha(u); }, 0.0, 1.0);
  EXPECT_NEAR(Delta(0.0, 1.0, p), oracle, 1e-12);
  EXPECT_NEAR(Delta(0.0, 1.0, p), 0.6321206, 1e-7);
}

TEST(Eta, TableParametersMatchAdaptiveQuadrature) {
  const MarketParams p;
  for (auto [s, t] : {std::pair{0.0, 24.0}, {3.0, 17.5}, {20.0, 24.0}}) {
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double u) { return p.a / p.liquidity.alpha(u); }, s, t, 15, 1e-14);
    EXPECT_NEAR(Eta(s, t, p), std::exp(-integral), 1e-12 * std::exp(-integral) + 1e-15);
    const double dt = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double u) { return 1.0 / p.liquidity.alpha(u); }, s, t, 15, 1e-14);
    EXPECT_NEAR(DeltaTilde(s, t, p), dt, 1e-11 * dt);
    const double d = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double u) { return Eta(u, t, p) / p.liquidity.alpha(u); }, s, t, 15, 1e-14);
    EXPECT_NEAR(Delta(s, t, p), d, 1e-11 * d);
  }
}

TEST(Eta, Semigroup) {
  const MarketParams p;
  for (auto [s, u, t] : {std::tuple{0.0, 5.0, 24.0}, {2.0, 2.0, 9.0}, {10.0, 23.9, 24.0}}) {
    const double lhs = Eta(s, u, p) * Eta(u, t, p);
    EXPECT_NEAR(lhs, Eta(s, t, p), 1e-12 * Eta(s, t, p));
  }
}

TEST(Delta, StrictlyIncreasingInT) {
  const MarketParams p;
  double prev_d = 0.0, prev_dt = 0.0;
  for (int k = 1; k <= 96; ++k) {
    const double t = 0.25 * k;
    const double d = Delta(0.0, t, p), dt = DeltaTilde(0.0, t, p);
    EXPECT_GT(d, prev_d);
    EXPECT_GT(dt, prev_dt);
    prev_d = d;
    prev_dt = dt;
  }
}

TEST(Kernels, RejectsReversedInterval) {
  const MarketParams p;
  EXPECT_THROW(Eta(5.0, 4.0, p), DomainError);
  EXPECT_THROW(Delta(0.0, 25.0, p), DomainError);
}

TEST(Fundamental, IdentityAtZeroAndForZeroGenerator) {
  const MarketParams p;
  EXPECT_LE(MaxAbsDiff(FundamentalMatrix(0.0, p), Mat3::Identity()), 0.0);
  MarketParams z;
  z.a = 0.0;
  z.a0 = 0.0;
  for (double t : {1.0, 12.0, 24.0}) {
    EXPECT_LE(MaxAbsDiff(FundamentalMatrix(t, z), Mat3::Identity()), 1e-15);
  }
}

TEST(Fundamental, MatchesRk4Oracle) {
  for (double a0 : {0.0, 0.5, 0.9}) {
    MarketParams p;
    p.a0 = a0;
    p.a = a0 > 0 ? 1.0 - a0 : 1.0;
    const Mat3 oracle = testing::Rk4Transition(0.0, 24.0, p, 20000);
    const Mat3 phi = FundamentalMatrix(24.0, p);
    EXPECT_LE(MaxAbsDiff(phi, oracle), 1e-9 * std::max(1.0, oracle.cwiseAbs().maxCoeff()))
        << "a0 = " << a0;
  }
}

TEST(Fundamental, FlowPropertyTwoWays) {
  MarketParams p;
  p.a0 = 0.5;
  p.a = 0.5;
  const double s = 6.0, t = 20.0;
  const Mat3 product = FundamentalMatrix(t, p) * FundamentalMatrix(s, p).inverse();
  const Mat3 direct = Propagate(s, t, p).transition;
  EXPECT_LE(MaxAbsDiff(product, direct), 1e-9 * std::max(1.0, direct.cwiseAbs().maxCoeff()));
}

TEST(Pi, EmptyIntervalIsZero) {
  const MarketParams p;
  EXPECT_LE(PiMatrix(7.0, 7.0, p).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pi, ZeroGeneratorConstantLiquidity) {
  MarketParams p = ConstantLiquidity(0.0, 0.0);
  p.liquidity.alpha_intercept = 2.0;
  p.liquidity.alpha0_intercept = 4.0;
  const Mat3 pi = PiMatrix(1.0, 3.0, p);
  Mat3 expected = Mat3::Zero();
  expected.diagonal() << 2.0 / 4.0, 2.0 / 2.0, 2.0 / 2.0;
  EXPECT_LE(MaxAbsDiff(pi, expected), 1e-14);
}

TEST(Pi, ClosedFormMatchesQuadratureAndSimpson) {
  const MarketParams p;
  const Mat3 closed = PiMatrix(0.0, 24.0, p);
  const Mat3 quad = PiMatrixQuadrature(0.0, 24.0, p);
  const double scale = closed.cwiseAbs().maxCoeff();
  EXPECT_LE(MaxAbsDiff(closed, quad), 1e-8 * std::max(1.0, scale));
  // Independent but low-order oracle; the growing mode limits it to ~1e-5.
  const Mat3 simpson = testing::SimpsonResponse(0.0, 24.0, p, 800);
  EXPECT_LE(MaxAbsDiff(closed, simpson), 1e-4 * std::max(1.0, scale));
}

TEST(Pi, Additivity) {
  for (double a0 : {0.0, 0.5}) {
    MarketParams p;
    p.a0 = a0;
    p.liquidity.alpha0_slope = 0.5;  // generic, non-proportional route
    const double s = 18.0, u = 21.0, t = 23.5;
    const Mat3 lhs = PiMatrix(s, t, p);
    const Mat3 rhs = Propagate(u, t, p).transition * PiMatrix(s, u, p) + PiMatrix(u, t, p);
    EXPECT_LE(MaxAbsDiff(lhs, rhs), 1e-9 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
  }
}

TEST(Propagate, GenericRouteAgreesWithClosedForm) {
  MarketParams p;
  p.a0 = 0.5;
  p.a = 0.5;
  const Propagation closed = Propagate(3.0, 21.0, p);
  const Propagation rk4 = PropagateRk4(3.0, 21.0, p);
  const Propagation fine = PropagateRk4(3.0, 21.0, p, 16);
  EXPECT_LE(MaxAbsDiff(closed.transition, rk4.transition), 1e-9);
  EXPECT_LE(MaxAbsDiff(closed.response, rk4.response), 1e-9);
  // Refining the internal substeps leaves the result unchanged.
  EXPECT_LE(MaxAbsDiff(rk4.transition, fine.transition), 1e-10);
  EXPECT_LE(MaxAbsDiff(rk4.response, fine.response), 1e-10);
}

TEST(KernelTable, GridInvariants) {
  MarketParams p;
  p.a0 = 0.5;
  p.a = 0.5;
  const TimeGrid grid(24.0, 48);
  const KernelTable table(p, grid);
  EXPECT_TRUE(table.proportional());
  EXPECT_LE(MaxAbsDiff(table.phi(0), Mat3::Identity()), 0.0);
  for (int k : {0, 17, 48}) {
    EXPECT_EQ(table.eta(k, k), 1.0);
    EXPECT_EQ(table.delta(k, k), 0.0);
    EXPECT_EQ(table.delta_tilde(k, k), 0.0);
    EXPECT_LE(table.pi(k, k).cwiseAbs().maxCoeff(), 0.0);
  }
  for (int j : {0, 10, 30}) {
    for (int k : {j, j + 5, 48}) {
      EXPECT_NEAR(table.eta(j, k), Eta(grid.t(j), grid.t(k), p), 1e-13);
      EXPECT_NEAR(table.delta(j, k), Delta(grid.t(j), grid.t(k), p), 1e-12);
      EXPECT_LE(MaxAbsDiff(table.pi(j, k), PiMatrix(grid.t(j), grid.t(k), p)), 1e-9);
      EXPECT_TRUE(table.transition(j, k).allFinite());
    }
  }
  EXPECT_LE(MaxAbsDiff(table.response_to_horizon(0), PiMatrix(0.0, 24.0, p)), 1e-9);
}

TEST(Linalg, InverseAndSingularity) {
  Mat3 m;
  m << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  EXPECT_LE(MaxAbsDiff(Inverse3(m) * m, Mat3::Identity()), 1e-14);
  Mat3 s;
  s << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  EXPECT_THROW(Inverse3(s, 5.0), SingularMatrixError);
  try {
    Inverse3(s, 5.0);
  } catch (const SingularMatrixError& e) {
    EXPECT_EQ(e.time(), 5.0);
  }
}

TEST(Linalg, ExpWithIntegralSingularGenerator) {
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1.0;  // nilpotent
  const ExpIntegral e = ExpWithIntegral(m, 2.0);
  Mat3 exp_expected = Mat3::Identity();
  exp_expected(0, 1) = -2.0;
  Mat3 int_expected = 2.0 * Mat3::Identity();
  int_expected(0, 1) = -2.0;
  EXPECT_LE(MaxAbsDiff(e.exp, exp_expected), 1e-14);
  EXPECT_LE(MaxAbsDiff(e.integral, int_expected), 1e-14);
}

}  // namespace
}  // namespace mfgmajor
