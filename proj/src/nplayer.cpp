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

#include "mfgmajor/nplayer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/kernels.hpp"
#include "parallel.hpp"

namespace mfgmajor {
namespace {

struct GaussRule {
  std::vector<double> x;  // on [-1, 1], increasing
  std::vector<double> w;
};

template <int N>
GaussRule MakeRule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = G::abscissa();
  const auto& weights = G::weights();
  GaussRule r;
  const int half = static_cast<int>(abscissa.size());
  for (int i = half - 1; i >= 0; --i) {
    if (abscissa[i] == 0.0) continue;
    r.x.push_back(-abscissa[i]);
    r.w.push_back(weights[i]);
  }
  for (int i = 0; i < half; ++i) {
    r.x.push_back(abscissa[i]);
    r.w.push_back(weights[i]);
  }
  return r;
}

const GaussRule& Rule(int order) {
  static const GaussRule r4 = MakeRule<4>();
  static const GaussRule r8 = MakeRule<8>();
  static const GaussRule r16 = MakeRule<16>();
  switch (order) {
    case 4:
      return r4;
    case 8:
      return r8;
    case 16:
      return r16;
    default:
      throw DomainError(fmt::format("quadrature order must be 4, 8 or 16, got {}", order));
  }
}

// int_lo^hi f(u) du with the 16-point rule.
template <class F>
auto Integrate(F&& f, double lo, double hi) {
  const GaussRule& r = Rule(16);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  auto acc = (r.w[0] * half) * f(mid + half * r.x[0]);
  for (std::size_t i = 1; i < r.x.size(); ++i) acc += (r.w[i] * half) * f(mid + half * r.x[i]);
  return acc;
}

Eigen::RowVector3d Row(const Mat3& m, int i) { return m.row(i); }

void CheckScenario(const ScenarioPath& s, const TimeGrid& grid) {
  s.Validate();
  if (!(s.grid == grid)) throw DomainError("scenario grid does not match the profile grid");
}

}  // namespace

CellQuadrature::CellQuadrature(const MarketParams& params, const TimeGrid& grid, int order)
    : grid_(grid), order_(order) {
  params.Validate();
  const GaussRule& rule = Rule(order);
  const LiquiditySchedule& liq = params.liquidity;
  const int n = grid.n_steps();
  const int size = n * order;
  time_.resize(size);
  weight_.resize(size);
  alpha_.resize(size);
  alpha0_.resize(size);
  w_.resize(size);
  decay_.resize(size);
  decay_int_.resize(size);
  decay_mom_.resize(size);
  g_.resize(size);
  pi_.resize(size);
  g_alpha_.resize(size);
  pi_alpha_.resize(size);
  cell_decay_mom_.resize(n);
  const double a = params.a;
  auto moment = [&](double lo, double hi) {
    return Integrate([&](double u) { return (u - lo) * Decay(u, hi, a, liq) / liq.alpha(u); },
                     lo, hi);
  };
  for (int k = 0; k < n; ++k) {
    const double lo = grid.t(k), hi = grid.t(k + 1);
    const double half = 0.5 * (hi - lo);
    for (int q = 0; q < order; ++q) {
      const int i = index(k, q);
      const double t = lo + half * (rule.x[q] + 1.0);
      time_[i] = t;
      weight_[i] = half * rule.w[q];
      alpha_[i] = liq.alpha(t);
      alpha0_[i] = liq.alpha0(t);
      w_[i] = DecayIntegral(lo, t, 0.0, liq);
      decay_[i] = Decay(lo, t, a, liq);
      decay_int_[i] = DecayIntegral(lo, t, a, liq);
      decay_mom_[i] = moment(lo, t);
      const Propagation p = Propagate(lo, t, params);
      g_[i] = p.transition;
      pi_[i] = p.response;
      g_alpha_[i] = Mat3::Zero();
      pi_alpha_[i] = Mat3::Zero();
      const GaussRule& inner = Rule(16);
      const double ih = 0.5 * (t - lo);
      for (std::size_t j = 0; j < inner.x.size(); ++j) {
        const double u = lo + ih * (inner.x[j] + 1.0);
        const Propagation pu = Propagate(lo, u, params);
        const double c = ih * inner.w[j] / liq.alpha(u);
        g_alpha_[i] += c * pu.transition;
        pi_alpha_[i] += c * pu.response;
      }
    }
    cell_decay_mom_[k] = moment(lo, hi);
  }
}

CellPath LinearCellPath(const CellQuadrature& quad, const std::vector<double>& values) {
  const TimeGrid& g = quad.grid();
  if (static_cast<int>(values.size()) != g.n_points()) {
    throw DomainError("path length does not match the grid");
  }
  CellPath p;
  p.grid = values;
  p.node.resize(quad.size());
  p.rate.resize(quad.size());
  for (int k = 0; k < g.n_steps(); ++k) {
    const double slope = (values[k + 1] - values[k]) / (g.t(k + 1) - g.t(k));
    for (int q = 0; q < quad.order(); ++q) {
      const int i = quad.index(k, q);
      p.node[i] = values[k] + slope * (quad.time(i) - g.t(k));
      p.rate[i] = slope;
    }
  }
  return p;
}

void StrategyProfile::UpdateAverage() {
  if (phi.empty()) throw DomainError("profile has no minor agents");
  const double inv = 1.0 / static_cast<double>(phi.size());
  phibar_N.grid.assign(phi[0].grid.size(), 0.0);
  phibar_N.node.assign(phi[0].node.size(), 0.0);
  phibar_N.rate.assign(phi[0].rate.size(), 0.0);
  for (const CellPath& p : phi) {
    for (std::size_t k = 0; k < p.grid.size(); ++k) phibar_N.grid[k] += p.grid[k];
    for (std::size_t k = 0; k < p.node.size(); ++k) {
      phibar_N.node[k] += p.node[k];
      phibar_N.rate[k] += p.rate[k];
    }
  }
  for (double& v : phibar_N.grid) v *= inv;
  for (double& v : phibar_N.node) v *= inv;
  for (double& v : phibar_N.rate) v *= inv;
}

namespace {

// Reward of a minor path facing the price S + a0 phi0 + others + own impact.
// `others` holds the extra price term at each node.
double MinorReward(const CellPath& own, const std::vector<double>& others, double own_impact,
                   const std::vector<double>& X, double penalty, const ScenarioPath& s,
                   const CellQuadrature& quad) {
  const TimeGrid& g = quad.grid();
  const int n = g.n_steps();
  double running = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int q = 0; q < quad.order(); ++q) {
      const int i = quad.index(k, q);
      const double v = own.rate[i];
      running += quad.weight(i) * (0.5 * quad.alpha(i) * v * v + v * (s.S[k + 1] + others[i]));
    }
  }
  const double phi_t = own.grid[n];
  const double phi_0 = own.grid[0];
  const double gap = phi_t - X[n];
  return -(running + 0.5 * own_impact * (phi_t * phi_t - phi_0 * phi_0) +
           0.5 * penalty * gap * gap);
}

double MajorReward(const CellPath& phi0, const std::vector<double>& minor_price,
                   const MarketParams& p, const ScenarioPath& s, const CellQuadrature& quad) {
  const int n = quad.grid().n_steps();
  double running = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int q = 0; q < quad.order(); ++q) {
      const int i = quad.index(k, q);
      const double v = phi0.rate[i];
      running +=
          quad.weight(i) * (0.5 * quad.alpha0(i) * v * v + v * (s.S[k + 1] + minor_price[i]));
    }
  }
  const double phi_t = phi0.grid[n];
  const double phi_0 = phi0.grid[0];
  const double gap = phi_t - s.X0[n];
  return -(running + 0.5 * p.a0 * (phi_t * phi_t - phi_0 * phi_0) + 0.5 * p.lambda0 * gap * gap);
}

void CheckProfile(const StrategyProfile& prof, const CellQuadrature& quad) {
  if (!(prof.grid == quad.grid())) throw DomainError("profile grid does not match quadrature");
  const std::size_t n = quad.size();
  auto check = [&](const CellPath& c) {
    if (c.grid.size() != static_cast<std::size_t>(quad.grid().n_points()) ||
        c.node.size() != n || c.rate.size() != n) {
      throw DomainError("profile path does not match the quadrature nodes");
    }
  };
  check(prof.phi0);
  check(prof.phibar_N);
  for (const CellPath& c : prof.phi) check(c);
}

}  // namespace

double ObjectiveMinor(int i, const StrategyProfile& prof, const ScenarioPath& s,
                      const MarketParams& p, const CellQuadrature& quad) {
  CheckProfile(prof, quad);
  CheckScenario(s, quad.grid());
  const int N = prof.n_minor();
  if (i < 0 || i >= N) throw DomainError(fmt::format("agent {} outside 0..{}", i, N - 1));
  if (s.n_minor() <= i) throw DomainError("scenario lacks the agent's forecast");
  const CellPath& own = prof.phi[i];
  std::vector<double> others(quad.size());
  for (int j = 0; j < quad.size(); ++j) {
    others[j] = p.a0 * prof.phi0.node[j] + p.a * (prof.phibar_N.node[j] - own.node[j] / N);
  }
  return MinorReward(own, others, p.a / N, s.X(i), p.lambda, s, quad);
}

double ObjectiveMajor(const StrategyProfile& prof, const ScenarioPath& s,
                      const MarketParams& p, const CellQuadrature& quad) {
  CheckProfile(prof, quad);
  CheckScenario(s, quad.grid());
  std::vector<double> price(quad.size());
  for (int j = 0; j < quad.size(); ++j) price[j] = p.a * prof.phibar_N.node[j];
  return MajorReward(prof.phi0, price, p, s, quad);
}

double ObjectiveMinorMeanField(const CellPath& phi, const CellPath& phibar,
                               const CellPath& phi0, const std::vector<double>& X,
                               const ScenarioPath& s, const MarketParams& p,
                               const CellQuadrature& quad) {
  CheckScenario(s, quad.grid());
  std::vector<double> others(quad.size());
  for (int j = 0; j < quad.size(); ++j) others[j] = p.a0 * phi0.node[j] + p.a * phibar.node[j];
  return MinorReward(phi, others, 0.0, X, p.lambda, s, quad);
}

namespace {

MeanEstimate Expect(const Ensemble& ensemble, int threads,
                    const std::function<double(const ScenarioPath&)>& f) {
  std::vector<double> values(ensemble.size());
  ParallelFor(ensemble.size(), threads, [&](int r) { values[r] = f(ensemble[r]); });
  return EstimateMean(values);
}

}  // namespace

MeanEstimate ExpectedObjectiveMinor(int i, const ProfileBuilder& build,
                                    const Ensemble& ensemble, const MarketParams& params,
                                    const CellQuadrature& quad, int threads) {
  return Expect(ensemble, threads, [&](const ScenarioPath& s) {
    return ObjectiveMinor(i, build(s), s, params, quad);
  });
}

MeanEstimate ExpectedObjectiveMajor(const ProfileBuilder& build, const Ensemble& ensemble,
                                    const MarketParams& params, const CellQuadrature& quad,
                                    int threads) {
  return Expect(ensemble, threads, [&](const ScenarioPath& s) {
    return ObjectiveMajor(build(s), s, params, quad);
  });
}

std::vector<MajorDeviation> DefaultMajorDeviations(double horizon) {
  using K = MajorDeviation::Kind;
  return {
      {"bump_early_up", K::kBump, 20.0, horizon / 6.0, horizon / 2.0},
      {"bump_late_down", K::kBump, -20.0, horizon / 2.0, 5.0 * horizon / 6.0},
      {"tilt_up", K::kTilt, 0.05, 0.0, horizon},
      {"tilt_down", K::kTilt, -0.05, 0.0, horizon},
  };
}

EpsNashHarness::EpsNashHarness(const MarketParams& params, const TimeGrid& grid, int order)
    : solver_(params, grid), quad_(params, grid, order) {
  flat_ = MakeScalarKernel(params.liquidity, grid, 0.0);
  decay_ = MakeScalarKernel(params.liquidity, grid, params.a);
  const KernelTable& table = solver_.table();
  const int n = grid.n_steps();
  w_.assign(n + 1, Eigen::RowVector3d::Zero());
  u_.assign(n + 1, Eigen::RowVector3d::Zero());
  for (int k = n - 1; k >= 0; --k) {
    w_[k] = Row(table.step_transition_over_alpha(k), 2) + w_[k + 1] * table.step_transition(k);
    u_[k] = Row(table.step_response_over_alpha(k), 2) + w_[k + 1] * table.step_response(k) +
            u_[k + 1];
  }
}

EpsNashState EpsNashHarness::Build(const ScenarioPath& s, int n_minor) const {
  CheckScenario(s, quad_.grid());
  if (!s.S_mean.empty()) {
    throw DomainError("the finite-N harness requires a driftless fundamental price");
  }
  if (n_minor < 1) throw DomainError("n_minor must be at least 1");
  if (s.n_minor() < n_minor) {
    throw DomainError(fmt::format("scenario has {} idiosyncratic paths, {} requested",
                                  s.n_minor(), n_minor));
  }
  const MarketParams& p = params();
  const TimeGrid& g = quad_.grid();
  const int n = g.n_steps();
  const Mat3 A = GeneratorMatrix(p);
  const Vec3 e = PriceLoading();

  EpsNashState st(g);
  st.equilibrium = solver_.Solve(s);
  const StackelbergEquilibrium& eq = st.equilibrium;
  st.Xi_nodes.resize(quad_.size());
  CellPath phi0, phibar;
  phi0.grid = eq.phi0();
  phibar.grid = eq.phibar();
  phi0.node.resize(quad_.size());
  phi0.rate.resize(quad_.size());
  phibar.node.resize(quad_.size());
  phibar.rate.resize(quad_.size());
  for (int k = 0; k < n; ++k) {
    const Vec3 c = eq.Mvec[k + 1] + e * s.S[k + 1];
    for (int q = 0; q < quad_.order(); ++q) {
      const int i = quad_.index(k, q);
      const Vec3 x = quad_.transition(i) * eq.Xi[k] - quad_.response(i) * c;
      const Vec3 cost = CostDiagonal(quad_.time(i), p.liquidity);
      const Vec3 v = -((A * x + c).array() / cost.array()).matrix();
      st.Xi_nodes[i] = x;
      phi0.node[i] = x(0);
      phi0.rate[i] = v(0);
      phibar.node[i] = x(2);
      phibar.rate[i] = v(2);
    }
  }
  st.phibar = phibar;
  st.profile.phi0 = phi0;
  st.profile.phi.reserve(n_minor);
  st.Ycheck.reserve(n_minor);
  for (int j = 0; j < n_minor; ++j) {
    TrackingProblem pb;
    pb.penalty = p.lambda;
    pb.target_weight = p.lambda;
    pb.target = s.Xcheck[j];
    const TrackingSolution iota = SolveTracking(flat_, pb);
    CellPath path = phibar;
    for (int k = 0; k <= n; ++k) path.grid[k] += iota.phi[k];
    for (int k = 0; k < n; ++k) {
      for (int q = 0; q < quad_.order(); ++q) {
        const int i = quad_.index(k, q);
        path.node[i] += iota.phi[k] - iota.Y[k + 1] * quad_.inverse_alpha_integral(i);
        path.rate[i] -= iota.Y[k + 1] / quad_.alpha(i);
      }
    }
    st.profile.phi.push_back(std::move(path));
    st.Ycheck.push_back(iota.Y);
  }
  st.profile.UpdateAverage();
  return st;
}

CellPath EpsNashHarness::MinorBestResponse(const ScenarioPath& s, const EpsNashState& st,
                                           int agent) const {
  const int N = st.profile.n_minor();
  if (agent < 0 || agent >= N) {
    throw DomainError(fmt::format("agent {} outside 0..{}", agent, N - 1));
  }
  const MarketParams& p = params();
  const KernelTable& table = solver_.table();
  const StackelbergEquilibrium& eq = st.equilibrium;
  const int n = quad_.grid().n_steps();
  const Vec3 e = PriceLoading();
  const double kappa = p.a / N;

  // Own idiosyncratic part with the extra own-impact penalty.
  TrackingProblem ip;
  ip.penalty = p.lambda + kappa;
  ip.target_weight = p.lambda;
  ip.target = s.Xcheck[agent];
  const TrackingSolution iota = SolveTracking(flat_, ip);

  // Common part: forcing -kappa phibar*, terminal shift kappa E_k[phibar*_T].
  TrackingProblem dp;
  dp.penalty = p.lambda + kappa;
  dp.target_weight = 0.0;
  dp.forcing.resize(n);
  dp.forcing_outlook.resize(n + 1);
  dp.terminal_shift.resize(n + 1);
  double past = 0.0;
  for (int k = 0; k <= n; ++k) {
    const Vec3 c_now = eq.Mvec[k] + e * s.S[k];
    dp.forcing_outlook[k] = past - kappa * (w_[k] * eq.Xi[k] - u_[k] * c_now).value();
    const Vec3 terminal = table.transition_to_horizon(k) * eq.Xi[k] -
                          table.response_to_horizon(k) * c_now;
    dp.terminal_shift[k] = kappa * terminal(2);
    if (k < n) {
      const Vec3 c = eq.Mvec[k + 1] + e * s.S[k + 1];
      const double cell = (Row(table.step_transition_over_alpha(k), 2) * eq.Xi[k] -
                           Row(table.step_response_over_alpha(k), 2) * c)
                              .value();
      dp.forcing[k] = -kappa * cell;
      past += dp.forcing[k];
    }
  }
  const TrackingSolution delta = SolveTracking(flat_, dp);

  // Reaction to the other minors' idiosyncratic trades, forcing
  // kappa sum_{j != i} iota^j with E_k[iota^j_t] = iota^j_k - Y^j_k int_{t_k}^t du/alpha.
  std::vector<double> others(n + 1, 0.0), others_y(n + 1, 0.0);
  for (int j = 0; j < N; ++j) {
    if (j == agent) continue;
    for (int k = 0; k <= n; ++k) {
      others[k] += st.profile.phi[j].grid[k] - st.phibar.grid[k];
      others_y[k] += st.Ycheck[j][k];
    }
  }
  TrackingProblem rp;
  rp.penalty = p.lambda + kappa;
  rp.target_weight = 0.0;
  rp.forcing.resize(n);
  rp.forcing_outlook.resize(n + 1);
  past = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double tail = flat_.tail[k];
    rp.forcing_outlook[k] = past + kappa * (others[k] * tail - 0.5 * others_y[k] * tail * tail);
    if (k < n) {
      const double w = flat_.step_integral[k];
      rp.forcing[k] = kappa * (others[k] * w - 0.5 * others_y[k + 1] * w * w);
      past += rp.forcing[k];
    }
  }
  const TrackingSolution rho = SolveTracking(flat_, rp);

  CellPath br = st.phibar;
  for (int k = 0; k <= n; ++k) br.grid[k] += iota.phi[k] + delta.phi[k] + rho.phi[k];
  for (int k = 0; k < n; ++k) {
    const Vec3 c = eq.Mvec[k + 1] + e * s.S[k + 1];
    for (int q = 0; q < quad_.order(); ++q) {
      const int i = quad_.index(k, q);
      const double w = quad_.inverse_alpha_integral(i);
      const double partial = (Row(quad_.transition_over_alpha(i), 2) * eq.Xi[k] -
                              Row(quad_.response_over_alpha(i), 2) * c)
                                 .value();
      const double others_node = others[k] - others_y[k + 1] * w;
      br.node[i] += iota.phi[k] - iota.Y[k + 1] * w + delta.phi[k] + kappa * partial -
                    delta.Y[k + 1] * w + rho.phi[k] - rho.Y[k + 1] * w -
                    kappa * (others[k] * w - 0.5 * others_y[k + 1] * w * w);
      br.rate[i] += (-iota.Y[k + 1] + kappa * st.phibar.node[i] - delta.Y[k + 1] -
                     kappa * others_node - rho.Y[k + 1]) /
                    quad_.alpha(i);
    }
  }
  return br;
}

EpsNashHarness::PreparedDeviation EpsNashHarness::Prepare(const MajorDeviation& dev) const {
  const MarketParams& p = params();
  const LiquiditySchedule& liq = p.liquidity;
  const TimeGrid& g = quad_.grid();
  const int n = g.n_steps();
  PreparedDeviation out;
  out.spec = dev;
  if (dev.kind == MajorDeviation::Kind::kTilt) {
    out.tail0.assign(n + 1, 0.0);
    out.tail_t.assign(n + 1, 0.0);
    out.tail1.assign(n + 1, 0.0);
    for (int j = n - 1; j >= 0; --j) {
      const double h = decay_.horizon_decay[j];
      out.tail0[j] = out.tail0[j + 1] + h * decay_.step_integral[j];
      out.tail_t[j] = out.tail_t[j + 1] + h * g.t(j) * decay_.step_integral[j];
      out.tail1[j] = out.tail1[j + 1] + h * quad_.cell_decay_moment(j);
    }
    return out;
  }
  // Snap the bump support to grid points so the path is smooth in each cell.
  const int ka = std::clamp(static_cast<int>(std::lround(dev.t_start / g.dt())), 0, n);
  const int kb = std::clamp(static_cast<int>(std::lround(dev.t_end / g.dt())), 0, n);
  const double ta = g.t(ka), tb = g.t(kb);
  const double width = tb - ta;
  auto beta = [&](double t) {
    if (kb <= ka || t <= ta || t >= tb) return 0.0;
    const double sn = std::sin(std::numbers::pi * (t - ta) / width);
    return dev.theta * sn * sn;
  };
  auto beta_rate = [&](double t) {
    if (kb <= ka || t <= ta || t >= tb) return 0.0;
    return dev.theta * std::numbers::pi / width *
           std::sin(2.0 * std::numbers::pi * (t - ta) / width);
  };
  out.grid.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.grid[k] = beta(g.t(k));
  out.node.resize(quad_.size());
  out.rate.resize(quad_.size());
  out.node_forcing.resize(quad_.size());
  out.forcing.resize(n);
  for (int k = 0; k < n; ++k) {
    const double lo = g.t(k);
    auto forcing_to = [&](double hi) {
      if (hi <= lo) return 0.0;
      return p.a0 * Integrate([&](double u) { return Decay(u, hi, p.a, liq) * beta(u) / liq.alpha(u); },
                              lo, hi);
    };
    for (int q = 0; q < quad_.order(); ++q) {
      const int i = quad_.index(k, q);
      out.node[i] = beta(quad_.time(i));
      out.rate[i] = beta_rate(quad_.time(i));
      out.node_forcing[i] = forcing_to(quad_.time(i));
    }
    out.forcing[k] = forcing_to(g.t(k + 1));
    out.outlook += decay_.horizon_decay[k] * out.forcing[k];
  }
  return out;
}

EpsNashHarness::DeviationPaths EpsNashHarness::Deviate(const ScenarioPath& s,
                                                       const PreparedDeviation& dev) const {
  const MarketParams& p = params();
  const TimeGrid& g = quad_.grid();
  const int n = g.n_steps();
  const double T = g.horizon();
  DeviationPaths out;
  CellPath& b = out.major;
  TrackingProblem pb;
  pb.penalty = p.lambda;
  pb.target_weight = 0.0;
  std::vector<double> node_forcing;
  if (dev.spec.kind == MajorDeviation::Kind::kBump) {
    b.grid = dev.grid;
    b.node = dev.node;
    b.rate = dev.rate;
    pb.forcing = dev.forcing;
    pb.forcing_outlook.assign(n + 1, dev.outlook);
    node_forcing = dev.node_forcing;
  } else {
    // Trading rate theta (X0_{k+1} - X0_0) / T on cell k.
    const double theta = dev.spec.theta;
    b.grid.assign(n + 1, 0.0);
    b.node.resize(quad_.size());
    b.rate.resize(quad_.size());
    node_forcing.resize(quad_.size());
    pb.forcing.resize(n);
    pb.forcing_outlook.resize(n + 1);
    double past = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double expected_rate = theta * (s.X0[k] - s.X0[0]) / T;
      pb.forcing_outlook[k] =
          past + p.a0 * (b.grid[k] * dev.tail0[k] +
                         expected_rate * (dev.tail_t[k] - g.t(k) * dev.tail0[k] + dev.tail1[k]));
      if (k == n) break;
      const double r = theta * (s.X0[k + 1] - s.X0[0]) / T;
      for (int q = 0; q < quad_.order(); ++q) {
        const int i = quad_.index(k, q);
        b.node[i] = b.grid[k] + r * (quad_.time(i) - g.t(k));
        b.rate[i] = r;
        node_forcing[i] = p.a0 * (b.grid[k] * quad_.decay_integral(i) + r * quad_.decay_moment(i));
      }
      pb.forcing[k] = p.a0 * (b.grid[k] * decay_.step_integral[k] + r * quad_.cell_decay_moment(k));
      past += decay_.horizon_decay[k] * pb.forcing[k];
      b.grid[k + 1] = b.grid[k] + r * (g.t(k + 1) - g.t(k));
    }
  }
  const TrackingSolution resp = SolveTracking(decay_, pb);
  CellPath& r = out.response;
  r.grid = resp.phi;
  r.node.resize(quad_.size());
  r.rate.resize(quad_.size());
  for (int k = 0; k < n; ++k) {
    for (int q = 0; q < quad_.order(); ++q) {
      const int i = quad_.index(k, q);
      r.node[i] = quad_.decay(i) * resp.phi[k] - node_forcing[i] -
                  resp.Y[k + 1] * quad_.decay_integral(i);
      r.rate[i] = -(p.a * r.node[i] + p.a0 * b.node[i] + resp.Y[k + 1]) / quad_.alpha(i);
    }
  }
  return out;
}

namespace {

CellPath Add(const CellPath& x, const CellPath& y) {
  CellPath z = x;
  for (std::size_t k = 0; k < z.grid.size(); ++k) z.grid[k] += y.grid[k];
  for (std::size_t k = 0; k < z.node.size(); ++k) {
    z.node[k] += y.node[k];
    z.rate[k] += y.rate[k];
  }
  return z;
}

}  // namespace

StrategyProfile EpsNashHarness::MajorDeviationProfile(const ScenarioPath& s,
                                                      const EpsNashState& st,
                                                      const MajorDeviation& deviation) const {
  const DeviationPaths d = Deviate(s, Prepare(deviation));
  StrategyProfile prof = st.profile;
  prof.phi0 = Add(prof.phi0, d.major);
  for (CellPath& c : prof.phi) c = Add(c, d.response);
  prof.UpdateAverage();
  return prof;
}

namespace {

struct ScenarioGains {
  double minor_gain = 0.0;  // with the martingale control variate
  double minor_raw = 0.0;
  std::vector<double> major_gain;
  // Integrals over time for the bound column.
  double gap_sq = 0.0;       // (phibar* - phibar_N)^2
  double minor_eq_sq = 0.0;  // (phi^i*)'^2
  double minor_br_sq = 0.0;
  double major_eq_sq = 0.0;
  std::vector<double> major_dev_sq;
  std::vector<double> terminal_xcheck;
};

double SquareIntegral(const std::vector<double>& v, const CellQuadrature& quad) {
  double acc = 0.0;
  for (int i = 0; i < quad.size(); ++i) acc += quad.weight(i) * v[i] * v[i];
  return acc;
}

ScenarioGains EvaluateScenario(const EpsNashHarness& h, const ScenarioPath& s, int N, int agent,
                               const std::vector<EpsNashHarness::PreparedDeviation>& devs,
                               bool with_minor) {
  const MarketParams& p = h.params();
  const CellQuadrature& quad = h.quadrature();
  const EpsNashState st = h.Build(s, N);
  ScenarioGains out;
  std::vector<double> gap(quad.size());
  for (int i = 0; i < quad.size(); ++i) gap[i] = st.phibar.node[i] - st.profile.phibar_N.node[i];
  out.gap_sq = SquareIntegral(gap, quad);
  for (int j = 0; j < N; ++j) out.terminal_xcheck.push_back(s.Xcheck[j].back());

  if (with_minor) {
    const CellPath& own = st.profile.phi[agent];
    std::vector<double> others(quad.size());
    for (int i = 0; i < quad.size(); ++i) {
      others[i] = p.a0 * st.profile.phi0.node[i] +
                  p.a * (st.profile.phibar_N.node[i] - own.node[i] / N);
    }
    const CellPath br = h.MinorBestResponse(s, st, agent);
    const std::vector<double> X = s.X(agent);
    out.minor_raw = MinorReward(br, others, p.a / N, X, p.lambda, s, quad) -
                    MinorReward(own, others, p.a / N, X, p.lambda, s, quad);
    // The deviator's adjoint Y, constant on each cell, read off its first
    // order condition. sum_k (phi*_k - br_k)(Y_{k+1} - Y_k) has zero mean.
    const TimeGrid& g = quad.grid();
    double control = 0.0;
    double y_prev = 0.0;
    for (int k = 0; k < g.n_steps(); ++k) {
      const int i = quad.index(k, 0);
      const double y = -(quad.alpha(i) * br.rate[i] + s.S[k + 1] + others[i]);
      if (k > 0) control += (own.grid[k] - br.grid[k]) * (y - y_prev);
      y_prev = y;
    }
    out.minor_gain = out.minor_raw - control;
    out.minor_eq_sq = SquareIntegral(own.rate, quad);
    out.minor_br_sq = SquareIntegral(br.rate, quad);
  }

  std::vector<double> price(quad.size());
  for (int i = 0; i < quad.size(); ++i) price[i] = p.a * st.profile.phibar_N.node[i];
  const double base = MajorReward(st.profile.phi0, price, p, s, quad);
  out.major_eq_sq = SquareIntegral(st.profile.phi0.rate, quad);
  for (const auto& dev : devs) {
    const EpsNashHarness::DeviationPaths d = h.Deviate(s, dev);
    const CellPath phi0 = Add(st.profile.phi0, d.major);
    std::vector<double> dev_price(quad.size());
    for (int i = 0; i < quad.size(); ++i) {
      dev_price[i] = p.a * (st.profile.phibar_N.node[i] + d.response.node[i]);
    }
    out.major_gain.push_back(MajorReward(phi0, dev_price, p, s, quad) - base);
    out.major_dev_sq.push_back(SquareIntegral(phi0.rate, quad));
  }
  return out;
}

double Bound(double a, double gap_sq, double dev_sq, double eq_sq) {
  return a * std::sqrt(gap_sq) * (std::sqrt(dev_sq) + std::sqrt(eq_sq));
}

std::vector<ScenarioGains> EvaluateEnsemble(
    const EpsNashHarness& h, const Ensemble& ens, int N, int agent,
    const std::vector<EpsNashHarness::PreparedDeviation>& devs, bool with_minor, int threads) {
  if (ens.n_minor() < N) {
    throw DomainError(fmt::format("ensemble has {} minor paths, {} requested", ens.n_minor(), N));
  }
  std::vector<ScenarioGains> out(ens.size());
  ParallelFor(ens.size(), threads, [&](int r) {
    out[r] = EvaluateScenario(h, ens[r], N, agent, devs, with_minor);
  });
  return out;
}

double MeanOf(const std::vector<ScenarioGains>& v, double ScenarioGains::*field) {
  double acc = 0.0;
  for (const auto& x : v) acc += x.*field;
  return acc / static_cast<double>(v.size());
}

GainEstimate MinorEstimate(const std::vector<ScenarioGains>& v, int N, double a) {
  std::vector<double> sample(v.size()), raw(v.size());
  for (std::size_t r = 0; r < v.size(); ++r) {
    sample[r] = v[r].minor_gain;
    raw[r] = v[r].minor_raw;
  }
  const MeanEstimate m = EstimateMean(sample);
  const MeanEstimate mr = EstimateMean(raw);
  GainEstimate g;
  g.N = N;
  g.deviation_id = "minor_best_response";
  g.gain = m.mean;
  g.se = m.se;
  g.raw_gain = mr.mean;
  g.raw_se = mr.se;
  g.bound = Bound(a, MeanOf(v, &ScenarioGains::gap_sq), MeanOf(v, &ScenarioGains::minor_br_sq),
                  MeanOf(v, &ScenarioGains::minor_eq_sq));
  return g;
}

std::vector<GainEstimate> MajorEstimates(const std::vector<ScenarioGains>& v, int N, double a,
                                         const std::vector<MajorDeviation>& devs) {
  std::vector<GainEstimate> out;
  const double gap = MeanOf(v, &ScenarioGains::gap_sq);
  const double eq = MeanOf(v, &ScenarioGains::major_eq_sq);
  for (std::size_t d = 0; d < devs.size(); ++d) {
    std::vector<double> sample(v.size());
    double dev_sq = 0.0;
    for (std::size_t r = 0; r < v.size(); ++r) {
      sample[r] = v[r].major_gain[d];
      dev_sq += v[r].major_dev_sq[d];
    }
    dev_sq /= static_cast<double>(v.size());
    const MeanEstimate m = EstimateMean(sample);
    out.push_back({N, devs[d].id, m.mean, m.se, Bound(a, gap, dev_sq, eq), m.mean, m.se});
  }
  return out;
}

std::vector<EpsNashHarness::PreparedDeviation> PrepareAll(
    const EpsNashHarness& h, const std::vector<MajorDeviation>& devs) {
  std::vector<EpsNashHarness::PreparedDeviation> out;
  for (const auto& d : devs) out.push_back(h.Prepare(d));
  return out;
}

ScalingFit Fit(const std::string& family, const std::vector<int>& sizes,
               const std::vector<double>& gains) {
  ScalingFit f;
  f.family = family;
  f.defined = sizes.size() >= 2 &&
              std::all_of(gains.begin(), gains.end(), [](double g) { return g > 0.0; });
  if (!f.defined) return f;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    x.push_back(std::log(static_cast<double>(sizes[i])));
    y.push_back(std::log(gains[i]));
  }
  const LineFit line = FitLine(x, y);
  f.slope = line.slope;
  f.C = std::exp(line.intercept);
  return f;
}

}  // namespace

GainEstimate MinorDeviationGain(const EpsNashHarness& h, const Ensemble& ens, int n_minor,
                                int agent, int threads) {
  if (agent < 0 || agent >= n_minor) {
    throw DomainError(fmt::format("agent {} outside 0..{}", agent, n_minor - 1));
  }
  const auto v = EvaluateEnsemble(h, ens, n_minor, agent, {}, true, threads);
  return MinorEstimate(v, n_minor, h.params().a);
}

std::vector<GainEstimate> MajorDeviationGains(const EpsNashHarness& h, const Ensemble& ens,
                                              int n_minor,
                                              const std::vector<MajorDeviation>& devs,
                                              int threads) {
  const auto v = EvaluateEnsemble(h, ens, n_minor, 0, PrepareAll(h, devs), false, threads);
  return MajorEstimates(v, n_minor, h.params().a, devs);
}

std::vector<std::string> CheckForecastVariances(
    const std::vector<std::vector<double>>& terminal, double tolerance) {
  std::vector<double> var;
  for (const auto& sample : terminal) {
    if (sample.size() < 2) continue;
    const MeanEstimate m = EstimateMean(sample);
    double ss = 0.0;
    for (double x : sample) ss += (x - m.mean) * (x - m.mean);
    var.push_back(ss / static_cast<double>(sample.size() - 1));
  }
  if (var.size() < 2) return {};
  double mean = 0.0;
  for (double v : var) mean += v;
  mean /= static_cast<double>(var.size());
  const auto [lo, hi] = std::minmax_element(var.begin(), var.end());
  if (mean > 0.0 && (*hi - *lo) / mean > tolerance) {
    return {fmt::format(
        "terminal idiosyncratic forecast variances range over [{:.4g}, {:.4g}] "
        "(mean {:.4g}); the harness assumes they are equal across agents",
        *lo, *hi, mean)};
  }
  return {};
}

ScalingStudy RunScalingStudy(const MarketParams& params, const TimeGrid& grid,
                             const ScalingOptions& opt) {
  if (opt.sizes.empty()) throw DomainError("scaling study needs at least one N");
  const std::vector<MajorDeviation> devs =
      opt.deviations.empty() ? DefaultMajorDeviations(grid.horizon()) : opt.deviations;
  const EpsNashHarness h(params, grid, opt.order);
  const auto prepared = PrepareAll(h, devs);
  ScalingStudy study;
  std::vector<double> minor_gains, major_gains;
  for (int N : opt.sizes) {
    const Ensemble ens(params, grid, N, opt.n_sim, opt.seed);
    const auto v = EvaluateEnsemble(h, ens, N, 0, prepared, true, opt.threads);
    const GainEstimate minor = MinorEstimate(v, N, params.a);
    study.rows.push_back(minor);
    minor_gains.push_back(minor.gain);
    double best = -std::numeric_limits<double>::infinity();
    for (const GainEstimate& g : MajorEstimates(v, N, params.a, devs)) {
      study.rows.push_back(g);
      best = std::max(best, g.gain);
    }
    major_gains.push_back(best);
    std::vector<std::vector<double>> terminal(N);
    for (const auto& sg : v) {
      for (int j = 0; j < N; ++j) terminal[j].push_back(sg.terminal_xcheck[j]);
    }
    for (auto& w : CheckForecastVariances(terminal)) {
      study.warnings.push_back(fmt::format("N = {}: {}", N, w));
    }
  }
  study.fits.push_back(Fit("minor", opt.sizes, minor_gains));
  study.fits.push_back(Fit("major", opt.sizes, major_gains));
  return study;
}

void WriteGainsCsv(std::ostream& out, const std::vector<GainEstimate>& rows) {
  WriteCsvRow(out, std::vector<std::string>{"N", "deviation_id", "gain", "se", "bound"});
  for (const auto& r : rows) {
    WriteCsvRow(out, std::vector<std::string>{std::to_string(r.N), r.deviation_id,
                                              FormatNumber(r.gain), FormatNumber(r.se),
                                              FormatNumber(r.bound)});
  }
}

}  // namespace mfgmajor
