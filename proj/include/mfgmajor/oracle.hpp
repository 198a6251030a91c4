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

#ifndef MFGMAJOR_ORACLE_HPP_
#define MFGMAJOR_ORACLE_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfgmajor/linalg.hpp"
#include "mfgmajor/scenarios.hpp"
#include "mfgmajor/stackelberg.hpp"
#include "mfgmajor/stats.hpp"

namespace mfgmajor {

struct AdjointState {
  Vec3 Xi;    // (phi0, N, phibar)
  Vec3 Mvec;  // (M0, M, Ybar), constant in the deterministic case
};

struct BvpSolution {
  std::vector<AdjointState> path;  // one state per grid point
  Vec3 M_initial;
  // Size of a second Newton step; zero up to round-off since the terminal
  // residual is affine in M_initial.
  double second_step = 0.0;
  // Max abs terminal residual after the Newton step.
  double terminal_residual = 0.0;
};

// Shooting solver for the deterministic adjoint system: integrate
// Xi' = -B^{-1}(A Xi + M + e S) forward from Xi_0 = 0 with RK4 and solve
// M = D Xi_T - Lambda (X0_T, 0, Xbar_T)' for the constant M. The price is
// piecewise constant, equal to S_path[k+1] on (t_k, t_{k+1}].
BvpSolution DeterministicBvp(const MarketParams& params, const TimeGrid& grid,
                             const std::vector<double>& S_path, double X0_T,
                             double Xbar_T, int substeps_per_cell = 256);

// Deterministic scalar tracking problem
//   alpha(t) phi' + rate * phi = -(price(t) + Y),
//   Y = penalty * phi_T - target_weight * X_T,  phi_0 = 0,
// solved by shooting on the constant Y. `price(t, k)` is evaluated inside
// cell k.
struct ScalarBvpSolution {
  std::vector<double> phi;
  double Y = 0.0;
};
ScalarBvpSolution ScalarTrackingBvp(
    const LiquiditySchedule& liquidity, const TimeGrid& grid, double rate,
    const std::function<double(double t, int cell)>& price, double penalty,
    double target_weight, double X_T, int substeps_per_cell = 256);

struct TestStatistic {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct FocReport {
  std::vector<TestStatistic> statistics;  // one per test process
  bool pass = false;
  // Max abs cell-integrated residuals of the major and minor optimality
  // conditions and of the minor terminal identity, over all scenarios.
  double major_residual = 0.0;
  double minor_residual = 0.0;
  double terminal_residual = 0.0;
};

// Monte Carlo check of the mean field first-order condition: for adapted
// test processes nu (Legendre polynomials in t times the state), the
// expectation of int nu (alpha phibar' + S + a0 phi0 + a phibar) dt +
// lambda (phibar_T - Xbar_T) int nu dt must vanish. `phibar_shift` adds a
// constant to phibar to probe the sensitivity of the test.
FocReport FocTest(const StackelbergSolver& solver, const Ensemble& ensemble,
                  int n_test_processes = 20, double phibar_shift = 0.0,
                  int threads = 1);

struct MartingaleReport {
  // Coefficients on (1, t, S, Xbar, X0) per candidate, named
  // "<candidate>:<regressor>".
  std::vector<TestStatistic> statistics;
  bool pass = false;
};

// Pooled regression of the increments of each candidate on the adapted
// basis (1, t, S_t, Xbar_t, X0_t), HC0 standard errors, 3 SE threshold.
class MartingaleResidualTest {
 public:
  explicit MartingaleResidualTest(std::vector<std::string> candidates);
  // One path per candidate, on the scenario's grid.
  void Add(const ScenarioPath& scenario,
           const std::vector<std::vector<double>>& paths);
  MartingaleReport Finish() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> x_;
  std::vector<std::vector<double>> y_;
};

void WriteFocCsv(std::ostream& out, const FocReport& report);
void WriteMartingaleCsv(std::ostream& out, const MartingaleReport& report);

}  // namespace mfgmajor

#endif  // MFGMAJOR_ORACLE_HPP_
