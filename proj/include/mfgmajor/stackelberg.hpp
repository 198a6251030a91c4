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

#ifndef MFGMAJOR_STACKELBERG_HPP_
#define MFGMAJOR_STACKELBERG_HPP_

#include <iosfwd>
#include <optional>
#include <vector>

#include "mfgmajor/kernels.hpp"
#include "mfgmajor/scenarios.hpp"
#include "mfgmajor/tracking.hpp"

namespace mfgmajor {

struct StackelbergEquilibrium {
  explicit StackelbergEquilibrium(const TimeGrid& g) : grid(g) {}

  TimeGrid grid;
  std::vector<Vec3> Xi;     // (phi0, N, phibar)
  std::vector<Vec3> Mvec;   // (M0, M, Ybar)
  std::vector<Vec3> Upsilon;
  std::vector<Vec3> Upsilon_tilde;
  std::vector<double> price;
  std::vector<double> phi_i;  // empty unless an agent was requested

  std::vector<double> phi0() const { return Component(Xi, 0); }
  std::vector<double> N() const { return Component(Xi, 1); }
  std::vector<double> phibar() const { return Component(Xi, 2); }
  std::vector<double> M0() const { return Component(Mvec, 0); }
  std::vector<double> M() const { return Component(Mvec, 1); }
  std::vector<double> Ybar() const { return Component(Mvec, 2); }

  static std::vector<double> Component(const std::vector<Vec3>& v, int i);
};

struct UpsilonPaths {
  std::vector<Vec3> Upsilon;
  std::vector<Vec3> Upsilon_tilde;
};

// Closed-form Stackelberg mean field equilibrium on a fixed grid.
//
// Discretization: on cell [t_k, t_{k+1}] the price and the martingales take
// their values at t_{k+1} and the linear system is integrated exactly, so
// Xi_{k+1} = G_k Xi_k - Pi_{k,k+1} (Mvec_{k+1} + e S_{k+1}). Stochastic
// integrals against dMvec are the matching left-point sums.
//
// The martingale is evaluated in feedback form,
// Mvec_k = H_k (D [G(T,t_k) Xi_k - O_k] - Lambda X_k), with O_k the
// conditional outlook of the price-driven terminal state, and each cell is
// solved implicitly. Summing H_k D dUpsilon_tilde_k forward instead is the
// same scheme in exact arithmetic but amplifies round-off through the
// growing mode of A when a0 > 0.
class StackelbergSolver {
 public:
  StackelbergSolver(const MarketParams& params, const TimeGrid& grid);

  const MarketParams& params() const { return params_; }
  const KernelTable& table() const { return table_; }
  const TimeGrid& grid() const { return table_.grid(); }

  UpsilonPaths Upsilon(const ScenarioPath& scenario) const;

  StackelbergEquilibrium Solve(const ScenarioPath& scenario) const;
  // Martingale-price form; rejects scenarios with a price drift.
  StackelbergEquilibrium SolveMartingaleForm(const ScenarioPath& scenario) const;
  // Infinite terminal penalties (lambda and lambda0 are ignored).
  StackelbergEquilibrium LimitInfinitePenalty(const ScenarioPath& scenario) const;
  // Same limit through the martingale-price weights Pi_{s,t} Pi_{s,T}^{-1}.
  StackelbergEquilibrium LimitInfinitePenaltyMartingaleForm(
      const ScenarioPath& scenario) const;
  // Zero terminal penalties (lambda and lambda0 are ignored).
  StackelbergEquilibrium LimitNoPenalty(const ScenarioPath& scenario) const;

  // phi^i = phibar + individual tracking of Xcheck[agent].
  std::vector<double> MinorStrategy(const ScenarioPath& scenario,
                                    const StackelbergEquilibrium& eq,
                                    int agent) const;
  // Idiosyncratic part phi^i - phibar for a given idiosyncratic forecast.
  std::vector<double> IdiosyncraticPart(const std::vector<double>& xcheck) const;

  // (I + D Pi_{t_k,T})^{-1} for every grid point.
  const std::vector<Mat3>& feedback() const { return feedback_; }

 private:
  // Mvec_k = gain_k Xi_k + offset_k; terminal_state pins Xi_n.
  struct FeedbackLaw {
    std::vector<Mat3> gain;
    std::vector<Vec3> offset;
    std::optional<Vec3> terminal_state;
  };

  std::vector<Vec3> ForecastVector(const ScenarioPath& scenario) const;
  std::vector<Vec3> PriceOutlook(const ScenarioPath& scenario) const;
  std::vector<Vec3> MartingaleOutlook(const ScenarioPath& scenario) const;
  FeedbackLaw PenaltyLaw(const ScenarioPath& scenario, const Mat3& d,
                         const Mat3& lambda, const std::vector<Mat3>& h,
                         const std::vector<Vec3>& outlook) const;
  FeedbackLaw InfiniteLaw(const ScenarioPath& scenario,
                          const std::vector<Vec3>& outlook) const;
  StackelbergEquilibrium Assemble(const ScenarioPath& scenario, const FeedbackLaw& law,
                                  UpsilonPaths ups) const;

  MarketParams params_;
  KernelTable table_;
  Mat3 D_, Lambda_;
  std::vector<Mat3> feedback_;
  std::vector<Vec3> horizon_weight_;  // G(T, t_{k+1}) Pi_{k,k+1} e
  ScalarKernel individual_;
};

// Convenience wrappers building a solver per call.
StackelbergEquilibrium SolveStackelberg(const ScenarioPath& scenario,
                                        const MarketParams& params);

// Columns t,phi0,N,phibar,price,M0,M,Ybar (+ phi_i when present).
void WriteStackelbergCsv(std::ostream& out, const StackelbergEquilibrium& eq);

}  // namespace mfgmajor

#endif  // MFGMAJOR_STACKELBERG_HPP_
