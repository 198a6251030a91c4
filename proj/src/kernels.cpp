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

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {
namespace {

using Gauss32 = boost::math::quadrature::gauss<double, 32>;

void CheckInterval(double s, double t, double horizon) {
  const double slack = 1e-12 * horizon;
  if (!(s >= -slack) || !(s <= t) || !(t <= horizon + slack)) {
    throw DomainError(
        fmt::format("kernel interval requires 0 <= s <= t <= T (s = {}, t = {}, T = {})",
                    s, t, horizon));
  }
}

// Nodes and weights of the 32-point rule mapped to [lo, hi].
template <class F>
void ForEachGaussNode(double lo, double hi, F&& f) {
  const auto& x = Gauss32::abscissa();
  const auto& w = Gauss32::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      f(mid, half * w[i]);
    } else {
      f(mid - half * x[i], half * w[i]);
      f(mid + half * x[i], half * w[i]);
    }
  }
}

Mat3 ProportionalGenerator(const MarketParams& params, double c) {
  Mat3 m = GeneratorMatrix(params);
  m.row(0) /= c;
  return m;
}

Propagation ProportionalPropagation(double s, double t, const MarketParams& params,
                                    double c) {
  const ExpIntegral e = ExpWithIntegral(ProportionalGenerator(params, c),
                                        DeltaTilde(s, t, params));
  Mat3 response = e.integral;
  response.col(0) /= c;
  return {e.exp, response};
}

Mat3 CostInverse(double t, const LiquiditySchedule& liq) {
  return CostDiagonal(t, liq).cwiseInverse().asDiagonal();
}

}  // namespace

Mat3 GeneratorMatrix(const MarketParams& p) {
  Mat3 a;
  a << 0.0, -p.a0, p.a,
       -p.a, -p.a, 0.0,
       p.a0, 0.0, p.a;
  return a;
}

Vec3 CostDiagonal(double t, const LiquiditySchedule& liq) {
  return Vec3(liq.alpha0(t), liq.alpha(t), liq.alpha(t));
}

Mat3 TerminalMatrix(const MarketParams& p) {
  Mat3 d;
  d << p.a0 + p.lambda0, p.a0, 0.0,
       p.a, p.a + p.lambda, 0.0,
       0.0, 0.0, p.lambda;
  return d;
}

Mat3 PenaltyMatrix(const MarketParams& p) {
  return Vec3(p.lambda0, 0.0, p.lambda).asDiagonal();
}

Mat3 InfinitePenaltyMatrix() { return Vec3(1.0, 0.0, 1.0).asDiagonal(); }

double DeltaTilde(double s, double t, const MarketParams& params) {
  const LiquiditySchedule& liq = params.liquidity;
  CheckInterval(s, t, liq.horizon);
  liq.Validate();
  if (s == t) return 0.0;
  if (liq.alpha_slope == 0.0) return (t - s) / liq.alpha_intercept;
  // (1/k) ln(alpha(s)/alpha(t)) with alpha(s) - alpha(t) = k (t - s).
  const double x = liq.alpha_slope * (t - s) / liq.alpha(t);
  return std::log1p(x) / liq.alpha_slope;
}

double Decay(double s, double t, double rate, const LiquiditySchedule& liq) {
  MarketParams p;
  p.liquidity = liq;
  return std::exp(-rate * DeltaTilde(s, t, p));
}

double DecayIntegral(double s, double t, double rate, const LiquiditySchedule& liq) {
  MarketParams p;
  p.liquidity = liq;
  const double dt = DeltaTilde(s, t, p);
  if (rate == 0.0) return dt;
  return -std::expm1(-rate * dt) / rate;
}

double Eta(double s, double t, const MarketParams& params) {
  return Decay(s, t, params.a, params.liquidity);
}

double Delta(double s, double t, const MarketParams& params) {
  return DecayIntegral(s, t, params.a, params.liquidity);
}

Propagation PropagateRk4(double s, double t, const MarketParams& params,
                         int min_substeps) {
  const LiquiditySchedule& liq = params.liquidity;
  CheckInterval(s, t, liq.horizon);
  liq.Validate();
  const Mat3 a = GeneratorMatrix(params);
  const double a_norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  const double min_alpha = std::min({liq.alpha(s), liq.alpha(t), liq.alpha0(s),
                                     liq.alpha0(t)});
  // Keep h * ||B^{-1} A|| <= 0.005 so the RK4 error stays near round-off.
  const int steps = std::max(
      min_substeps,
      static_cast<int>(std::ceil((t - s) * a_norm / min_alpha / 0.005)));
  const double h = (t - s) / steps;

  using State = Eigen::Matrix<double, 3, 6>;
  auto rhs = [&](double u, const State& y) {
    const Mat3 binv = CostInverse(u, liq);
    State dy;
    dy.leftCols<3>() = -binv * a * y.leftCols<3>();
    dy.rightCols<3>() = -binv * a * y.rightCols<3>() + binv;
    return dy;
  };
  State y;
  y.leftCols<3>() = Mat3::Identity();
  y.rightCols<3>() = Mat3::Zero();
  for (int i = 0; i < steps; ++i) {
    const double u = s + i * h;
    const State k1 = rhs(u, y);
    const State k2 = rhs(u + 0.5 * h, y + 0.5 * h * k1);
    const State k3 = rhs(u + 0.5 * h, y + 0.5 * h * k2);
    const State k4 = rhs(u + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {y.leftCols<3>(), y.rightCols<3>()};
}

Propagation Propagate(double s, double t, const MarketParams& params,
                      int min_substeps) {
  const LiquiditySchedule& liq = params.liquidity;
  CheckInterval(s, t, liq.horizon);
  liq.Validate();
  if (const auto c = liq.Proportionality()) {
    return ProportionalPropagation(s, t, params, *c);
  }
  return PropagateRk4(s, t, params, min_substeps);
}

Mat3 FundamentalMatrix(double t, const MarketParams& params) {
  return Propagate(0.0, t, params).transition;
}

Mat3 PiMatrix(double s, double t, const MarketParams& params) {
  const LiquiditySchedule& liq = params.liquidity;
  CheckInterval(s, t, liq.horizon);
  liq.Validate();
  if (const auto c = liq.Proportionality()) {
    return ProportionalPropagation(s, t, params, *c).response;
  }
  return PiMatrixQuadrature(s, t, params);
}

Mat3 PiMatrixQuadrature(double s, double t, const MarketParams& params,
                        int panels) {
  const LiquiditySchedule& liq = params.liquidity;
  CheckInterval(s, t, liq.horizon);
  liq.Validate();
  if (s == t) return Mat3::Zero();
  if (panels <= 0) panels = std::max(1, static_cast<int>(std::ceil((t - s) / 0.25)));
  Mat3 sum = Mat3::Zero();
  const double width = (t - s) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = s + p * width;
    const double hi = p + 1 == panels ? t : lo + width;
    ForEachGaussNode(lo, hi, [&](double u, double w) {
      sum += w * Propagate(u, t, params).transition * CostInverse(u, liq);
    });
  }
  return sum;
}

KernelTable::KernelTable(const MarketParams& params, const TimeGrid& grid)
    : params_(params), grid_(grid) {
  params_.liquidity.Validate();
  if (std::abs(grid.horizon() - params.horizon()) > 1e-12 * params.horizon()) {
    throw DomainError(fmt::format("grid horizon {} differs from schedule horizon {}",
                                  grid.horizon(), params.horizon()));
  }
  const int n = grid.n_steps();
  const auto c = params_.liquidity.Proportionality();
  proportional_ = c.has_value();

  step_g_.resize(n);
  step_pi_.resize(n);
  int_g_.resize(n);
  int_pi_.resize(n);
  int_g_alpha_.resize(n);
  int_pi_alpha_.resize(n);
  for (int k = 0; k < n; ++k) {
    const Propagation step = Propagate(grid.t(k), grid.t(k + 1), params_);
    step_g_[k] = step.transition;
    step_pi_[k] = step.response;
    Mat3 ig = Mat3::Zero(), ip = Mat3::Zero(), iga = Mat3::Zero(), ipa = Mat3::Zero();
    ForEachGaussNode(grid.t(k), grid.t(k + 1), [&](double u, double w) {
      const Propagation part = Propagate(grid.t(k), u, params_);
      const double wa = w / params_.liquidity.alpha(u);
      ig += w * part.transition;
      ip += w * part.response;
      iga += wa * part.transition;
      ipa += wa * part.response;
    });
    int_g_[k] = ig;
    int_pi_[k] = ip;
    int_g_alpha_[k] = iga;
    int_pi_alpha_[k] = ipa;
  }

  phi_.resize(n + 1);
  phi_inv_.resize(n + 1);
  g_to_t_.resize(n + 1);
  pi_to_t_.resize(n + 1);
  if (proportional_) {
    const Mat3 m = ProportionalGenerator(params_, *c);
    for (int k = 0; k <= n; ++k) {
      const double tau = DeltaTilde(0.0, grid.t(k), params_);
      phi_[k] = ExpWithIntegral(m, tau).exp;
      phi_inv_[k] = ExpWithIntegral(m, -tau).exp;
      const Propagation tail = Propagate(grid.t(k), grid.horizon(), params_);
      g_to_t_[k] = tail.transition;
      pi_to_t_[k] = tail.response;
    }
  } else {
    phi_[0] = Mat3::Identity();
    phi_inv_[0] = Mat3::Identity();
    for (int k = 0; k < n; ++k) {
      phi_[k + 1] = step_g_[k] * phi_[k];
      phi_inv_[k + 1] = phi_inv_[k] * Inverse3(step_g_[k], grid.t(k));
    }
    g_to_t_[n] = Mat3::Identity();
    pi_to_t_[n] = Mat3::Zero();
    for (int k = n - 1; k >= 0; --k) {
      g_to_t_[k] = g_to_t_[k + 1] * step_g_[k];
      pi_to_t_[k] = g_to_t_[k + 1] * step_pi_[k] + pi_to_t_[k + 1];
    }
  }
}

double KernelTable::eta(int j, int k) const {
  return Eta(grid_.t(j), grid_.t(k), params_);
}

double KernelTable::delta(int j, int k) const {
  return Delta(grid_.t(j), grid_.t(k), params_);
}

double KernelTable::delta_tilde(int j, int k) const {
  return DeltaTilde(grid_.t(j), grid_.t(k), params_);
}

Mat3 KernelTable::transition(int j, int k) const {
  if (j > k) throw DomainError(fmt::format("transition needs j <= k (j = {}, k = {})", j, k));
  if (proportional_) return Propagate(grid_.t(j), grid_.t(k), params_).transition;
  Mat3 g = Mat3::Identity();
  for (int m = j; m < k; ++m) g = step_g_[m] * g;
  return g;
}

Mat3 KernelTable::pi(int j, int k) const {
  if (j > k) throw DomainError(fmt::format("pi needs j <= k (j = {}, k = {})", j, k));
  if (proportional_) return Propagate(grid_.t(j), grid_.t(k), params_).response;
  Mat3 p = Mat3::Zero();
  for (int m = j; m < k; ++m) p = step_g_[m] * p + step_pi_[m];
  return p;
}

}  // namespace mfgmajor
