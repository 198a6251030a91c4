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

#ifndef MFGMAJOR_NPLAYER_HPP_
#define MFGMAJOR_NPLAYER_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfgmajor/linalg.hpp"
#include "mfgmajor/scenarios.hpp"
#include "mfgmajor/stackelberg.hpp"
#include "mfgmajor/stats.hpp"

namespace mfgmajor {

// Gauss-Legendre nodes inside every grid cell together with the propagators
// from the cell start to each node. The finite-N objectives are integrated
// on these nodes; all strategies are smooth inside a cell, so the rule is
// accurate to round-off for the default order once the cells are short
// against the boundary layer at T (about 96 cells per day). Coarser grids
// need order 16.
class CellQuadrature {
 public:
  CellQuadrature(const MarketParams& params, const TimeGrid& grid, int order = 8);

  const TimeGrid& grid() const { return grid_; }
  int order() const { return order_; }
  int size() const { return grid_.n_steps() * order_; }
  int index(int k, int q) const { return k * order_ + q; }

  double time(int node) const { return time_[node]; }
  // Includes the cell length.
  double weight(int node) const { return weight_[node]; }
  double alpha(int node) const { return alpha_[node]; }
  double alpha0(int node) const { return alpha0_[node]; }

  // G(t_node, t_k) and Pi_{t_k, t_node}.
  const Mat3& transition(int node) const { return g_[node]; }
  const Mat3& response(int node) const { return pi_[node]; }
  // int_{t_k}^{t_node} G(u, t_k)/alpha(u) du and the same for Pi_{t_k, u}.
  const Mat3& transition_over_alpha(int node) const { return g_alpha_[node]; }
  const Mat3& response_over_alpha(int node) const { return pi_alpha_[node]; }
  // int_{t_k}^{t_node} du/alpha(u).
  double inverse_alpha_integral(int node) const { return w_[node]; }
  // Decay(t_k, t_node), int Decay(u, t_node)/alpha(u) du and
  // int (u - t_k) Decay(u, t_node)/alpha(u) du at rate a.
  double decay(int node) const { return decay_[node]; }
  double decay_integral(int node) const { return decay_int_[node]; }
  double decay_moment(int node) const { return decay_mom_[node]; }
  // Moment over the whole cell k, ending at t_{k+1}.
  double cell_decay_moment(int k) const { return cell_decay_mom_[k]; }

 private:
  TimeGrid grid_;
  int order_;
  std::vector<double> time_, weight_, alpha_, alpha0_, w_, decay_, decay_int_,
      decay_mom_, cell_decay_mom_;
  std::vector<Mat3> g_, pi_, g_alpha_, pi_alpha_;
};

// A position path on the grid with its values and trading rates at the
// quadrature nodes.
struct CellPath {
  std::vector<double> grid;  // n + 1 values
  std::vector<double> node;  // value at each quadrature node
  std::vector<double> rate;  // time derivative at each quadrature node
};

// Piecewise linear path through grid values.
CellPath LinearCellPath(const CellQuadrature& quad, const std::vector<double>& values);

struct StrategyProfile {
  explicit StrategyProfile(const TimeGrid& g) : grid(g) {}

  TimeGrid grid;
  CellPath phi0;
  std::vector<CellPath> phi;  // minor agents 1..N
  CellPath phibar_N;          // average of phi

  int n_minor() const { return static_cast<int>(phi.size()); }
  // Recomputes phibar_N from phi.
  void UpdateAverage();
};

// Per-scenario finite-N objectives (rewards, higher is better) with the
// price P = S + a phibar_N + a0 phi0. Own impact enters through the exact
// identity int phi' phi dt = (phi_T^2 - phi_0^2) / 2.
double ObjectiveMinor(int i, const StrategyProfile& profile, const ScenarioPath& scenario,
                      const MarketParams& params, const CellQuadrature& quad);
double ObjectiveMajor(const StrategyProfile& profile, const ScenarioPath& scenario,
                      const MarketParams& params, const CellQuadrature& quad);
// Mean field objective of a minor strategy against the price
// S + a phibar + a0 phi0.
double ObjectiveMinorMeanField(const CellPath& phi, const CellPath& phibar,
                               const CellPath& phi0, const std::vector<double>& X,
                               const ScenarioPath& scenario, const MarketParams& params,
                               const CellQuadrature& quad);

// Ensemble averages of the objectives of a profile built per scenario.
using ProfileBuilder = std::function<StrategyProfile(const ScenarioPath&)>;
MeanEstimate ExpectedObjectiveMinor(int i, const ProfileBuilder& build,
                                    const Ensemble& ensemble, const MarketParams& params,
                                    const CellQuadrature& quad, int threads = 1);
MeanEstimate ExpectedObjectiveMajor(const ProfileBuilder& build, const Ensemble& ensemble,
                                    const MarketParams& params, const CellQuadrature& quad,
                                    int threads = 1);

// Bounded perturbations of the major strategy.
//   bump: theta * sin^2(pi (t - t_start) / (t_end - t_start)) MWh on
//         [t_start, t_end], endpoints snapped to the grid;
//   tilt: extra trading rate theta * (X0_t - X0_0) / T.
struct MajorDeviation {
  enum class Kind { kBump, kTilt };
  std::string id;
  Kind kind = Kind::kBump;
  double theta = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};
std::vector<MajorDeviation> DefaultMajorDeviations(double horizon);

// Everything computed for one scenario of the finite-N game.
struct EpsNashState {
  explicit EpsNashState(const TimeGrid& g) : equilibrium(g), profile(g) {}

  StackelbergEquilibrium equilibrium;
  std::vector<Vec3> Xi_nodes;  // Xi at the quadrature nodes
  CellPath phibar;             // mean field phibar*
  StrategyProfile profile;
  std::vector<std::vector<double>> Ycheck;  // idiosyncratic martingales
};

// Finite-N strategies around the Stackelberg mean field equilibrium.
class EpsNashHarness {
 public:
  EpsNashHarness(const MarketParams& params, const TimeGrid& grid, int order = 8);

  const StackelbergSolver& solver() const { return solver_; }
  const CellQuadrature& quadrature() const { return quad_; }
  const MarketParams& params() const { return solver_.params(); }

  // Minors play phibar* + individual tracking of Xcheck[i], the major plays
  // phi0*. Uses the first n_minor idiosyncratic paths.
  EpsNashState Build(const ScenarioPath& scenario, int n_minor) const;

  // Exact best response of minor i to the others' equilibrium strategies.
  CellPath MinorBestResponse(const ScenarioPath& scenario, const EpsNashState& state,
                             int i) const;
  // Deterministic tables of a deviation, reusable across scenarios.
  struct PreparedDeviation {
    MajorDeviation spec;
    // Bump: the path, its forcing of the minors' response and the partial
    // forcing up to each node. Tilt: suffix sums for the outlook.
    std::vector<double> grid, node, rate, forcing, node_forcing;
    double outlook = 0.0;
    std::vector<double> tail0, tail_t, tail1;
  };
  PreparedDeviation Prepare(const MajorDeviation& deviation) const;

  // Perturbation of phi0 and the re-response of the mean field minors.
  struct DeviationPaths {
    CellPath major;     // added to phi0*
    CellPath response;  // added to every minor
  };
  DeviationPaths Deviate(const ScenarioPath& scenario, const PreparedDeviation& dev) const;

  // Profile after the major deviates and the minors re-respond with the
  // mean field best response.
  StrategyProfile MajorDeviationProfile(const ScenarioPath& scenario,
                                        const EpsNashState& state,
                                        const MajorDeviation& deviation) const;

 private:

  StackelbergSolver solver_;
  CellQuadrature quad_;
  ScalarKernel flat_;   // rate 0
  ScalarKernel decay_;  // rate a
  // Row vectors giving sum_{j >= k} E_k[int_cell j phibar*/alpha] as
  // w_k Xi_k - u_k (Mvec_k + e S_k).
  std::vector<Eigen::RowVector3d> w_, u_;
};

struct GainEstimate {
  int N = 0;
  std::string deviation_id;
  double gain = 0.0;
  double se = 0.0;
  // a ||phibar - phibar_N|| (||dev'|| + ||eq'||), L2 over paths and time.
  double bound = 0.0;
  // Plain difference of objectives. For minor deviations `gain` subtracts
  // the zero-mean martingale term sum_k (phi*_k - br_k) dY_k of the
  // deviator's adjoint, which leaves the expected gain unchanged.
  double raw_gain = 0.0;
  double raw_se = 0.0;
};

// Ensemble gains with common random numbers.
GainEstimate MinorDeviationGain(const EpsNashHarness& harness, const Ensemble& ensemble,
                                int n_minor, int agent = 0, int threads = 1);
std::vector<GainEstimate> MajorDeviationGains(
    const EpsNashHarness& harness, const Ensemble& ensemble, int n_minor,
    const std::vector<MajorDeviation>& deviations, int threads = 1);

// log(gain) = log(C) + slope log(N) over the positive gains of one family.
struct ScalingFit {
  std::string family;
  bool defined = false;  // false unless every gain is positive
  double slope = 0.0;
  double C = 0.0;
};

struct ScalingStudy {
  std::vector<GainEstimate> rows;
  std::vector<ScalingFit> fits;  // "minor" and "major"
  std::vector<std::string> warnings;
};

struct ScalingOptions {
  std::vector<int> sizes = {4, 16, 64, 256};
  int n_sim = 10000;
  std::uint64_t seed = 20260101;
  std::vector<MajorDeviation> deviations;  // empty picks the default family
  int threads = 1;
  int order = 8;
};

ScalingStudy RunScalingStudy(const MarketParams& params, const TimeGrid& grid,
                             const ScalingOptions& options);

// Warns when the sample variances of the terminal idiosyncratic forecasts
// (one sample per agent) differ by more than `tolerance` relative to their
// mean. Empty when consistent.
std::vector<std::string> CheckForecastVariances(
    const std::vector<std::vector<double>>& terminal_by_agent, double tolerance = 0.1);

// Columns N,deviation_id,gain,se,bound.
void WriteGainsCsv(std::ostream& out, const std::vector<GainEstimate>& rows);

}  // namespace mfgmajor

#endif  // MFGMAJOR_NPLAYER_HPP_
