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

#ifndef MFGMAJOR_KERNELS_HPP_
#define MFGMAJOR_KERNELS_HPP_

#include <vector>

#include "mfgmajor/grid.hpp"
#include "mfgmajor/linalg.hpp"
#include "mfgmajor/params.hpp"

namespace mfgmajor {

// Coefficients of the linear system for (phi0, N, phibar).
Mat3 GeneratorMatrix(const MarketParams& params);              // A
Vec3 CostDiagonal(double t, const LiquiditySchedule& liq);     // diag B(t)
Mat3 TerminalMatrix(const MarketParams& params);               // D
Mat3 PenaltyMatrix(const MarketParams& params);                // Lambda
Mat3 InfinitePenaltyMatrix();                                  // D_inf
// Loading of the fundamental price on (phi0, N, phibar).
inline Vec3 PriceLoading() { return Vec3(1.0, 0.0, 1.0); }

// int_s^t 1/alpha(u) du.
double DeltaTilde(double s, double t, const MarketParams& params);
// exp(-int_s^t a/alpha(u) du).
double Eta(double s, double t, const MarketParams& params);
// int_s^t Eta(u, t)/alpha(u) du.
double Delta(double s, double t, const MarketParams& params);

// Same kernels with the impact weight a replaced by `rate`.
double Decay(double s, double t, double rate, const LiquiditySchedule& liq);
double DecayIntegral(double s, double t, double rate,
                     const LiquiditySchedule& liq);

// G(t, s) = Phi(t) Phi(s)^{-1} and Pi_{s,t} = int_s^t G(t, u) B(u)^{-1} du.
struct Propagation {
  Mat3 transition;
  Mat3 response;
};

// Closed form when alpha0 = c alpha, RK4 on the augmented system otherwise
// (at least `min_substeps` steps, more where the system is stiff).
Propagation Propagate(double s, double t, const MarketParams& params,
                      int min_substeps = 8);
// RK4 route regardless of proportionality.
Propagation PropagateRk4(double s, double t, const MarketParams& params,
                         int min_substeps = 8);

Mat3 FundamentalMatrix(double t, const MarketParams& params);
// Closed form in the proportional case, quadrature otherwise.
Mat3 PiMatrix(double s, double t, const MarketParams& params);
// Composite 32-node Gauss-Legendre quadrature of G(t, u) B(u)^{-1}, with
// `panels` panels (0 picks one panel per quarter hour).
Mat3 PiMatrixQuadrature(double s, double t, const MarketParams& params,
                        int panels = 0);

// Kernels on a fixed grid. Immutable after construction.
class KernelTable {
 public:
  KernelTable(const MarketParams& params, const TimeGrid& grid);

  const MarketParams& params() const { return params_; }
  const TimeGrid& grid() const { return grid_; }
  bool proportional() const { return proportional_; }

  // Scalar kernels between grid points t_j <= t_k.
  double eta(int j, int k) const;
  double delta(int j, int k) const;
  double delta_tilde(int j, int k) const;

  const Mat3& phi(int k) const { return phi_[k]; }
  const Mat3& phi_inv(int k) const { return phi_inv_[k]; }
  // G(t_k, t_j) and Pi_{t_j, t_k}.
  Mat3 transition(int j, int k) const;
  Mat3 pi(int j, int k) const;

  // Cell k = [t_k, t_{k+1}].
  const Mat3& step_transition(int k) const { return step_g_[k]; }
  const Mat3& step_response(int k) const { return step_pi_[k]; }
  // int over cell k of G(t, t_k) dt and of Pi_{t_k, t} dt.
  const Mat3& step_transition_integral(int k) const { return int_g_[k]; }
  const Mat3& step_response_integral(int k) const { return int_pi_[k]; }
  // Same integrals with the weight 1/alpha(t).
  const Mat3& step_transition_over_alpha(int k) const { return int_g_alpha_[k]; }
  const Mat3& step_response_over_alpha(int k) const { return int_pi_alpha_[k]; }

  // G(T, t_k) and Pi_{t_k, T}.
  const Mat3& transition_to_horizon(int k) const { return g_to_t_[k]; }
  const Mat3& response_to_horizon(int k) const { return pi_to_t_[k]; }

 private:
  MarketParams params_;
  TimeGrid grid_;
  bool proportional_ = false;
  std::vector<Mat3> phi_, phi_inv_;
  std::vector<Mat3> step_g_, step_pi_, int_g_, int_pi_, int_g_alpha_, int_pi_alpha_;
  std::vector<Mat3> g_to_t_, pi_to_t_;
};

}  // namespace mfgmajor

#endif  // MFGMAJOR_KERNELS_HPP_
