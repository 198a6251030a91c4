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
#include <limits>
#include <ostream>

#include <Eigen/LU>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/kernels.hpp"
#include "mfgmajor/rng.hpp"
#include "parallel.hpp"

namespace mfgmajor {
namespace {

// The shooting map amplifies round-off through the growing mode of A, so the
// adjoint oracle runs in extended precision.
using LVec3 = Eigen::Matrix<long double, 3, 1>;
using LMat3 = Eigen::Matrix<long double, 3, 3>;

// RK4 for Xi' = -B^{-1}(A Xi + f_k) with f_k constant on cell k.
std::vector<LVec3> IntegrateAdjoint(const MarketParams& params, const TimeGrid& grid,
                                    const std::vector<LVec3>& forcing, int substeps) {
  const LMat3 a = GeneratorMatrix(params).cast<long double>();
  const LiquiditySchedule& liq = params.liquidity;
  const int n = grid.n_steps();
  std::vector<LVec3> path(n + 1);
  path[0] = LVec3::Zero();
  LVec3 xi = LVec3::Zero();
  for (int k = 0; k < n; ++k) {
    const long double t0 = grid.t(k);
    const long double h = (static_cast<long double>(grid.t(k + 1)) - t0) / substeps;
    const LVec3& f = forcing[k];
    auto rhs = [&](long double u, const LVec3& y) -> LVec3 {
      const long double left = liq.horizon - u;
      const LVec3 cost(liq.alpha0_slope * left + liq.alpha0_intercept,
                       liq.alpha_slope * left + liq.alpha_intercept,
                       liq.alpha_slope * left + liq.alpha_intercept);
      return -((a * y + f).array() / cost.array()).matrix();
    };
    for (int i = 0; i < substeps; ++i) {
      const long double u = t0 + i * h;
      const LVec3 k1 = rhs(u, xi);
      const LVec3 k2 = rhs(u + 0.5L * h, xi + 0.5L * h * k1);
      const LVec3 k3 = rhs(u + 0.5L * h, xi + 0.5L * h * k2);
      const LVec3 k4 = rhs(u + h, xi + h * k3);
      xi += (h / 6.0L) * (k1 + 2.0L * k2 + 2.0L * k3 + k4);
    }
    path[k + 1] = xi;
  }
  return path;
}

std::vector<double> IntegrateScalar(const LiquiditySchedule& liq, const TimeGrid& grid,
                                    double rate,
                                    const std::function<double(double, int)>& price,
                                    double y, int substeps) {
  const int n = grid.n_steps();
  std::vector<double> path(n + 1);
  path[0] = 0.0;
  double phi = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t0 = grid.t(k);
    const double h = (grid.t(k + 1) - t0) / substeps;
    auto rhs = [&](double u, double v) {
      const double p = price ? price(u, k) : 0.0;
      return -(rate * v + p + y) / liq.alpha(u);
    };
    for (int i = 0; i < substeps; ++i) {
      const double u = t0 + i * h;
      const double k1 = rhs(u, phi);
      const double k2 = rhs(u + 0.5 * h, phi + 0.5 * h * k1);
      const double k3 = rhs(u + 0.5 * h, phi + 0.5 * h * k2);
      const double k4 = rhs(u + h, phi + h * k3);
      phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    path[k + 1] = phi;
  }
  return path;
}

}  // namespace

BvpSolution DeterministicBvp(const MarketParams& params, const TimeGrid& grid,
                             const std::vector<double>& S_path, double X0_T,
                             double Xbar_T, int substeps_per_cell) {
  params.liquidity.Validate();
  const int n = grid.n_steps();
  if (static_cast<int>(S_path.size()) != n + 1) {
    throw DomainError("deterministic price path must have one value per grid point");
  }
  if (substeps_per_cell < 1) throw DomainError("substeps_per_cell must be positive");
  const LMat3 d = TerminalMatrix(params).cast<long double>();
  const LVec3 target =
      (PenaltyMatrix(params) * Vec3(X0_T, 0.0, Xbar_T)).cast<long double>();
  const LVec3 e = PriceLoading().cast<long double>();

  auto shoot = [&](const LVec3& m, bool with_price) {
    std::vector<LVec3> forcing(n, m);
    if (with_price) {
      for (int k = 0; k < n; ++k) forcing[k] += e * static_cast<long double>(S_path[k + 1]);
    }
    return IntegrateAdjoint(params, grid, forcing, substeps_per_cell);
  };
  auto residual = [&](const LVec3& m, const LVec3& xi_t) -> LVec3 {
    return m - (d * xi_t - target);
  };

  // The terminal map is affine in M: Xi_T(M) = Xi_T(0) + L M.
  LMat3 l;
  for (int i = 0; i < 3; ++i) l.col(i) = shoot(LVec3::Unit(i), false).back();
  const Eigen::FullPivLU<LMat3> jac(LMat3::Identity() - d * l);
  if (!(jac.rcond() > 4.0L * std::numeric_limits<double>::epsilon())) {
    throw SingularMatrixError(
        fmt::format("singular shooting map (reciprocal condition {:.3e})",
                    static_cast<double>(jac.rcond())),
        grid.horizon());
  }

  const LVec3 m0 = LVec3::Zero();
  const LVec3 m1 = m0 - jac.solve(residual(m0, shoot(m0, true).back()));
  const std::vector<LVec3> path1 = shoot(m1, true);
  const LVec3 r1 = residual(m1, path1.back());
  const LVec3 m2 = m1 - jac.solve(r1);

  BvpSolution sol;
  sol.M_initial = m1.cast<double>();
  sol.second_step = static_cast<double>((m2 - m1).cwiseAbs().maxCoeff());
  sol.terminal_residual = static_cast<double>(r1.cwiseAbs().maxCoeff());
  sol.path.resize(n + 1);
  for (int k = 0; k <= n; ++k) sol.path[k] = {path1[k].cast<double>(), sol.M_initial};
  return sol;
}

ScalarBvpSolution ScalarTrackingBvp(const LiquiditySchedule& liquidity,
                                    const TimeGrid& grid, double rate,
                                    const std::function<double(double, int)>& price,
                                    double penalty, double target_weight, double X_T,
                                    int substeps_per_cell) {
  liquidity.Validate();
  if (substeps_per_cell < 1) throw DomainError("substeps_per_cell must be positive");
  const double base = IntegrateScalar(liquidity, grid, rate, price, 0.0, substeps_per_cell).back();
  const double unit = IntegrateScalar(liquidity, grid, rate, nullptr, 1.0, substeps_per_cell).back();
  // Y = q (base + unit Y) - lambda X.
  const double denom = 1.0 - penalty * unit;
  if (std::abs(denom) < 1e-14) {
    throw SingularMatrixError("scalar shooting map is singular", grid.horizon());
  }
  ScalarBvpSolution sol;
  sol.Y = (penalty * base - target_weight * X_T) / denom;
  sol.phi = IntegrateScalar(liquidity, grid, rate, price, sol.Y, substeps_per_cell);
  return sol;
}

namespace {

constexpr int kLegendreDegrees = 4;
constexpr int kStateFactors = 5;
const char* const kStateNames[kStateFactors] = {"1", "S", "Xbar", "X0", "phi0"};

// Cell integrals of the idiosyncratic displacement kernel int Delta~(t_k, t) dt.
std::vector<double> CellDeltaTildeIntegrals(const MarketParams& params,
                                            const TimeGrid& grid) {
  using Gauss = boost::math::quadrature::gauss<double, 32>;
  std::vector<double> out(grid.n_steps());
  for (int k = 0; k < grid.n_steps(); ++k) {
    const double lo = grid.t(k), hi = grid.t(k + 1);
    out[k] = Gauss::integrate([&](double t) { return DeltaTilde(lo, t, params); }, lo, hi);
  }
  return out;
}

}  // namespace

FocReport FocTest(const StackelbergSolver& solver, const Ensemble& ensemble,
                  int n_test_processes, double phibar_shift, int threads) {
  if (n_test_processes < 0) throw DomainError("n_test_processes must be non-negative");
  const MarketParams& p = solver.params();
  const LiquiditySchedule& liq = p.liquidity;
  const TimeGrid& grid = solver.grid();
  if (!(ensemble.grid() == grid)) throw DomainError("ensemble grid does not match solver");
  const KernelTable& table = solver.table();
  const int n = grid.n_steps();
  const double dt = grid.dt();
  const double T = grid.horizon();
  const Vec3 e = PriceLoading();
  const std::vector<double> dtilde_int = CellDeltaTildeIntegrals(p, grid);

  // Test processes: the 4 x 5 base family, extended by seeded random
  // combinations when more are requested.
  const int n_base = kLegendreDegrees * kStateFactors;
  std::vector<std::vector<double>> mix(n_test_processes, std::vector<double>(n_base, 0.0));
  std::vector<std::string> names(n_test_processes);
  {
    NormalStream normal(0x5eedf0c5ULL, 0);
    for (int v = 0; v < n_test_processes; ++v) {
      if (v < n_base) {
        mix[v][v] = 1.0;
        names[v] = fmt::format("P{}(t)*{}", v / kStateFactors, kStateNames[v % kStateFactors]);
      } else {
        for (double& c : mix[v]) c = normal.Next();
        names[v] = fmt::format("mix{}", v - n_base);
      }
    }
  }
  std::vector<std::vector<double>> legendre(kLegendreDegrees, std::vector<double>(n));
  for (int d = 0; d < kLegendreDegrees; ++d) {
    for (int k = 0; k < n; ++k) legendre[d][k] = std::legendre(d, 2.0 * grid.t(k) / T - 1.0);
  }
  const double sqrt_t = std::sqrt(T);
  auto scale = [&](double sigma) { return sigma > 0.0 ? sigma * sqrt_t : 1.0; };
  const double state_scale[kStateFactors] = {1.0, scale(p.sigma_S), scale(p.sigma_bar),
                                             scale(p.sigma_0), scale(p.sigma_0)};

  const int n_sim = ensemble.size();
  std::vector<std::vector<double>> values(n_test_processes, std::vector<double>(n_sim));
  std::vector<double> major_res(n_sim, 0.0), minor_res(n_sim, 0.0), term_res(n_sim, 0.0);

  ParallelFor(n_sim, threads, [&](int r) {
    const ScenarioPath s = ensemble[r];
    const StackelbergEquilibrium eq = solver.Solve(s);
    std::vector<double> foc(n);
    std::vector<std::vector<double>> base(n_base, std::vector<double>(n));
    double major = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vec3 drive = eq.Mvec[k + 1] + e * s.S[k + 1];
      const Vec3 integral = table.step_transition_integral(k) * eq.Xi[k] -
                            table.step_response_integral(k) * drive;
      const double pb0 = eq.Xi[k](2) + phibar_shift;
      const double pb1 = eq.Xi[k + 1](2) + phibar_shift;
      const double ipb = integral(2) + phibar_shift * dt;
      foc[k] = liq.alpha(grid.t(k + 1)) * pb1 - liq.alpha(grid.t(k)) * pb0 +
               liq.alpha_slope * ipb + s.S[k + 1] * dt + p.a0 * integral(0) + p.a * ipb;
      major = std::max(major, std::abs(liq.alpha0(grid.t(k + 1)) * eq.Xi[k + 1](0) -
                                       liq.alpha0(grid.t(k)) * eq.Xi[k](0) +
                                       liq.alpha0_slope * integral(0) +
                                       (eq.Mvec[k + 1](0) + s.S[k + 1]) * dt +
                                       p.a * integral(2) - p.a0 * integral(1)));
      const double z[kStateFactors] = {1.0, s.S[k] - p.S0, s.Xbar[k] - p.Xbar0,
                                       s.X0[k] - p.X0_0, eq.Xi[k](0)};
      for (int b = 0; b < n_base; ++b) {
        base[b][k] = legendre[b / kStateFactors][k] * z[b % kStateFactors] /
                     state_scale[b % kStateFactors];
      }
    }
    major_res[r] = major;
    const double terminal = p.lambda * (eq.Xi[n](2) + phibar_shift - s.Xbar[n]);
    for (int v = 0; v < n_test_processes; ++v) {
      double acc = 0.0;
      double nu_int = 0.0;
      for (int k = 0; k < n; ++k) {
        double nu = 0.0;
        for (int b = 0; b < n_base; ++b) {
          if (mix[v][b] != 0.0) nu += mix[v][b] * base[b][k];
        }
        acc += nu * foc[k];
        nu_int += nu * dt;
      }
      values[v][r] = acc + terminal * nu_int;
    }

    // Minor agent: phi = phibar + iota, Y = Ybar + Ycheck.
    if (s.n_minor() > 0) {
      TrackingProblem pb;
      pb.penalty = p.lambda;
      pb.target_weight = p.lambda;
      pb.target = s.Xcheck[0];
      const TrackingSolution iota =
          SolveTracking(MakeScalarKernel(liq, grid, 0.0), pb);
      double minor = 0.0;
      for (int k = 0; k < n; ++k) {
        const Vec3 drive = eq.Mvec[k + 1] + e * s.S[k + 1];
        const Vec3 integral = table.step_transition_integral(k) * eq.Xi[k] -
                              table.step_response_integral(k) * drive;
        const double i_iota = iota.phi[k] * dt - iota.Y[k + 1] * dtilde_int[k];
        const double phi0 = eq.Xi[k](2) + iota.phi[k];
        const double phi1 = eq.Xi[k + 1](2) + iota.phi[k + 1];
        const double y = eq.Mvec[k + 1](2) + iota.Y[k + 1];
        minor = std::max(minor, std::abs(liq.alpha(grid.t(k + 1)) * phi1 -
                                         liq.alpha(grid.t(k)) * phi0 +
                                         liq.alpha_slope * (integral(2) + i_iota) +
                                         (s.S[k + 1] + y) * dt + p.a * integral(2) +
                                         p.a0 * integral(0)));
      }
      minor_res[r] = minor;
      const double y_n = eq.Mvec[n](2) + iota.Y[n];
      const double x_n = s.Xbar[n] + s.Xcheck[0][n];
      term_res[r] = std::abs(y_n - p.lambda * (eq.Xi[n](2) + iota.phi[n] - x_n));
    }
  });

  FocReport report;
  report.pass = true;
  for (int v = 0; v < n_test_processes; ++v) {
    const MeanEstimate m = EstimateMean(values[v]);
    TestStatistic st{names[v], m.mean, m.se, std::abs(m.mean) <= 3.0 * m.se};
    report.pass = report.pass && st.pass;
    report.statistics.push_back(st);
  }
  for (int r = 0; r < n_sim; ++r) {
    report.major_residual = std::max(report.major_residual, major_res[r]);
    report.minor_residual = std::max(report.minor_residual, minor_res[r]);
    report.terminal_residual = std::max(report.terminal_residual, term_res[r]);
  }
  return report;
}

MartingaleResidualTest::MartingaleResidualTest(std::vector<std::string> candidates)
    : names_(std::move(candidates)), y_(names_.size()) {}

void MartingaleResidualTest::Add(const ScenarioPath& s,
                                 const std::vector<std::vector<double>>& paths) {
  if (paths.size() != names_.size()) {
    throw DomainError(fmt::format("expected {} candidate paths, got {}", names_.size(),
                                  paths.size()));
  }
  const int n = s.grid.n_steps();
  for (const auto& path : paths) {
    if (static_cast<int>(path.size()) != n + 1) {
      throw DomainError("candidate path does not match the scenario grid");
    }
  }
  for (int k = 0; k < n; ++k) {
    x_.insert(x_.end(), {1.0, s.grid.t(k), s.S[k], s.Xbar[k], s.X0[k]});
    for (std::size_t c = 0; c < paths.size(); ++c) {
      y_[c].push_back(paths[c][k + 1] - paths[c][k]);
    }
  }
}

MartingaleReport MartingaleResidualTest::Finish() const {
  static const char* const kRegressors[] = {"const", "t", "S", "Xbar", "X0"};
  MartingaleReport report;
  report.pass = true;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    const RegressionResult fit = RobustOls(x_, 5, y_[c]);
    for (int j = 0; j < 5; ++j) {
      TestStatistic st{fmt::format("{}:{}", names_[c], kRegressors[j]), fit.coef[j],
                       fit.se[j], std::abs(fit.coef[j]) <= 3.0 * fit.se[j]};
      report.pass = report.pass && st.pass;
      report.statistics.push_back(st);
    }
  }
  return report;
}

namespace {

void WriteStatistics(std::ostream& out, const std::vector<TestStatistic>& stats) {
  WriteCsvRow(out, std::vector<std::string>{"name", "estimate", "se", "pass"});
  for (const auto& st : stats) {
    WriteCsvRow(out, std::vector<std::string>{st.name, FormatNumber(st.estimate),
                                              FormatNumber(st.se), st.pass ? "1" : "0"});
  }
}

}  // namespace

void WriteFocCsv(std::ostream& out, const FocReport& report) {
  WriteStatistics(out, report.statistics);
}

void WriteMartingaleCsv(std::ostream& out, const MartingaleReport& report) {
  WriteStatistics(out, report.statistics);
}

}  // namespace mfgmajor
