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

#include "mfgmajor/stackelberg.hpp"

#include <ostream>

#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"

namespace mfgmajor {

std::vector<double> StackelbergEquilibrium::Component(const std::vector<Vec3>& v,
                                                      int i) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k](i);
  return out;
}

StackelbergSolver::StackelbergSolver(const MarketParams& params, const TimeGrid& grid)
    : params_(params), table_((params.Validate(), params), grid) {
  D_ = TerminalMatrix(params_);
  Lambda_ = PenaltyMatrix(params_);
  const int n = grid.n_steps();
  feedback_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    feedback_[k] = Inverse3(Mat3::Identity() + D_ * table_.response_to_horizon(k),
                            grid.t(k));
  }
  horizon_weight_.resize(n);
  for (int j = 0; j < n; ++j) {
    horizon_weight_[j] =
        table_.transition_to_horizon(j + 1) * table_.step_response(j) * PriceLoading();
  }
  individual_ = MakeScalarKernel(params_.liquidity, grid, 0.0);
}

std::vector<Vec3> StackelbergSolver::ForecastVector(const ScenarioPath& s) const {
  std::vector<Vec3> x(s.grid.n_points());
  for (int k = 0; k < s.grid.n_points(); ++k) x[k] = Vec3(s.X0[k], 0.0, s.Xbar[k]);
  return x;
}

UpsilonPaths StackelbergSolver::Upsilon(const ScenarioPath& s) const {
  s.Validate();
  if (!(s.grid == grid())) throw DomainError("scenario grid does not match solver grid");
  const int n = grid().n_steps();
  const Vec3 e = PriceLoading();
  UpsilonPaths out;
  out.Upsilon.resize(n + 1);
  out.Upsilon_tilde.resize(n + 1);
  out.Upsilon[0] = Vec3::Zero();
  for (int k = 0; k < n; ++k) {
    out.Upsilon[k + 1] = table_.step_transition(k) * out.Upsilon[k] -
                         table_.step_response(k) * e * s.S[k + 1];
  }
  const bool drift = !s.S_mean.empty();
  std::vector<Vec3> drift_tail(n + 1, Vec3::Zero());
  if (drift) {
    for (int j = n - 1; j >= 0; --j) {
      drift_tail[j] = drift_tail[j + 1] + horizon_weight_[j] * s.S_mean[j + 1];
    }
  }
  Vec3 past = Vec3::Zero();
  for (int k = 0; k <= n; ++k) {
    const double centred = drift ? s.S[k] - s.S_mean[k] : s.S[k];
    out.Upsilon_tilde[k] =
        -(past + table_.response_to_horizon(k) * e * centred + drift_tail[k]);
    if (k < n) past += horizon_weight_[k] * s.S[k + 1];
  }
  return out;
}

std::vector<Vec3> StackelbergSolver::PriceOutlook(const ScenarioPath& s) const {
  // sum_{j >= k} U_j E_k[S_{j+1}] from running tail sums of the horizon weights.
  const int n = grid().n_steps();
  const bool drift = !s.S_mean.empty();
  std::vector<Vec3> out(n + 1);
  Vec3 tail = Vec3::Zero();
  Vec3 drift_tail = Vec3::Zero();
  out[n] = Vec3::Zero();
  for (int k = n - 1; k >= 0; --k) {
    tail += horizon_weight_[k];
    if (drift) drift_tail += horizon_weight_[k] * s.S_mean[k + 1];
    const double centred = drift ? s.S[k] - s.S_mean[k] : s.S[k];
    out[k] = tail * centred + drift_tail;
  }
  return out;
}

StackelbergEquilibrium StackelbergSolver::Assemble(const ScenarioPath& s,
                                                   const FeedbackLaw& law,
                                                   UpsilonPaths ups) const {
  const int n = grid().n_steps();
  const Vec3 e = PriceLoading();
  StackelbergEquilibrium eq(grid());
  eq.Xi.resize(n + 1);
  eq.Mvec.resize(n + 1);
  eq.price.resize(n + 1);
  eq.Xi[0] = Vec3::Zero();
  eq.Mvec[0] = law.offset[0];
  for (int k = 0; k < n; ++k) {
    const Mat3& resp = table_.step_response(k);
    const Vec3 rhs = table_.step_transition(k) * eq.Xi[k] -
                     resp * (law.offset[k + 1] + e * s.S[k + 1]);
    if (k + 1 == n && law.terminal_state) {
      eq.Xi[n] = *law.terminal_state;
      const Mat3 inv = Inverse3(resp, grid().t(k));
      eq.Mvec[n] = inv * (rhs - eq.Xi[n]) + law.offset[n];
      break;
    }
    const Mat3 lhs = Mat3::Identity() + resp * law.gain[k + 1];
    eq.Xi[k + 1] = lhs.partialPivLu().solve(rhs);
    eq.Mvec[k + 1] = law.gain[k + 1] * eq.Xi[k + 1] + law.offset[k + 1];
  }
  for (int k = 0; k <= n; ++k) {
    eq.price[k] = s.S[k] + params_.a * eq.Xi[k](2) + params_.a0 * eq.Xi[k](0);
  }
  eq.Upsilon = std::move(ups.Upsilon);
  eq.Upsilon_tilde = std::move(ups.Upsilon_tilde);
  return eq;
}

StackelbergSolver::FeedbackLaw StackelbergSolver::PenaltyLaw(
    const ScenarioPath& s, const Mat3& d, const Mat3& lambda,
    const std::vector<Mat3>& h, const std::vector<Vec3>& outlook) const {
  const std::vector<Vec3> x = ForecastVector(s);
  const int n = grid().n_steps();
  FeedbackLaw law;
  law.gain.resize(n + 1);
  law.offset.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    law.gain[k] = h[k] * d * table_.transition_to_horizon(k);
    law.offset[k] = -h[k] * (d * outlook[k] + lambda * x[k]);
  }
  return law;
}

StackelbergSolver::FeedbackLaw StackelbergSolver::InfiniteLaw(
    const ScenarioPath& s, const std::vector<Vec3>& outlook) const {
  const std::vector<Vec3> x = ForecastVector(s);
  const Mat3 d_inf = InfinitePenaltyMatrix();
  const int n = grid().n_steps();
  FeedbackLaw law;
  law.gain.resize(n + 1, Mat3::Zero());
  law.offset.resize(n + 1, Vec3::Zero());
  for (int k = 0; k < n; ++k) {
    const Mat3 inv = Inverse3(table_.response_to_horizon(k), grid().t(k));
    law.gain[k] = inv * table_.transition_to_horizon(k);
    law.offset[k] = -inv * (outlook[k] + d_inf * x[k]);
  }
  law.terminal_state = d_inf * x[n];
  return law;
}

std::vector<Vec3> StackelbergSolver::MartingaleOutlook(const ScenarioPath& s) const {
  if (!s.S_mean.empty()) {
    throw DomainError("the martingale form requires a driftless fundamental price");
  }
  const Vec3 e = PriceLoading();
  std::vector<Vec3> out(grid().n_points());
  for (int k = 0; k < grid().n_points(); ++k) {
    out[k] = table_.response_to_horizon(k) * e * s.S[k];
  }
  return out;
}

StackelbergEquilibrium StackelbergSolver::Solve(const ScenarioPath& s) const {
  UpsilonPaths ups = Upsilon(s);
  const FeedbackLaw law = PenaltyLaw(s, D_, Lambda_, feedback_, PriceOutlook(s));
  return Assemble(s, law, std::move(ups));
}

StackelbergEquilibrium StackelbergSolver::SolveMartingaleForm(const ScenarioPath& s) const {
  const std::vector<Vec3> outlook = MartingaleOutlook(s);
  UpsilonPaths ups = Upsilon(s);
  const FeedbackLaw law = PenaltyLaw(s, D_, Lambda_, feedback_, outlook);
  return Assemble(s, law, std::move(ups));
}

StackelbergEquilibrium StackelbergSolver::LimitInfinitePenalty(const ScenarioPath& s) const {
  UpsilonPaths ups = Upsilon(s);
  return Assemble(s, InfiniteLaw(s, PriceOutlook(s)), std::move(ups));
}

StackelbergEquilibrium StackelbergSolver::LimitInfinitePenaltyMartingaleForm(
    const ScenarioPath& s) const {
  const std::vector<Vec3> outlook = MartingaleOutlook(s);
  UpsilonPaths ups = Upsilon(s);
  return Assemble(s, InfiniteLaw(s, outlook), std::move(ups));
}

StackelbergEquilibrium StackelbergSolver::LimitNoPenalty(const ScenarioPath& s) const {
  UpsilonPaths ups = Upsilon(s);
  MarketParams p0 = params_;
  p0.lambda = 0.0;
  p0.lambda0 = 0.0;
  const Mat3 d0 = TerminalMatrix(p0);
  const int n = grid().n_steps();
  std::vector<Mat3> h0(n + 1);
  for (int k = 0; k <= n; ++k) {
    h0[k] = Inverse3(Mat3::Identity() + d0 * table_.response_to_horizon(k), grid().t(k));
  }
  const FeedbackLaw law = PenaltyLaw(s, d0, Mat3::Zero(), h0, PriceOutlook(s));
  return Assemble(s, law, std::move(ups));
}

std::vector<double> StackelbergSolver::IdiosyncraticPart(
    const std::vector<double>& xcheck) const {
  TrackingProblem pb;
  pb.penalty = params_.lambda;
  pb.target_weight = params_.lambda;
  pb.target = xcheck;
  return SolveTracking(individual_, pb).phi;
}

std::vector<double> StackelbergSolver::MinorStrategy(const ScenarioPath& s,
                                                     const StackelbergEquilibrium& eq,
                                                     int agent) const {
  if (agent < 0 || agent >= s.n_minor()) {
    throw DomainError(fmt::format("agent {} outside the scenario's {} minor paths",
                                  agent, s.n_minor()));
  }
  std::vector<double> phi = IdiosyncraticPart(s.Xcheck[agent]);
  for (std::size_t k = 0; k < phi.size(); ++k) phi[k] += eq.Xi[k](2);
  return phi;
}

StackelbergEquilibrium SolveStackelberg(const ScenarioPath& scenario,
                                        const MarketParams& params) {
  return StackelbergSolver(params, scenario.grid).Solve(scenario);
}

void WriteStackelbergCsv(std::ostream& out, const StackelbergEquilibrium& eq) {
  std::vector<std::string> header = {"t", "phi0", "N", "phibar", "price", "M0", "M", "Ybar"};
  const bool with_agent = !eq.phi_i.empty();
  if (with_agent) header.push_back("phi_i");
  WriteCsvRow(out, header);
  for (int k = 0; k < eq.grid.n_points(); ++k) {
    std::vector<double> row = {eq.grid.t(k), eq.Xi[k](0),   eq.Xi[k](1),   eq.Xi[k](2),
                               eq.price[k],  eq.Mvec[k](0), eq.Mvec[k](1), eq.Mvec[k](2)};
    if (with_agent) row.push_back(eq.phi_i[k]);
    WriteCsvRow(out, row);
  }
}

}  // namespace mfgmajor
