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

// Acceptance run: one PASS/FAIL line per criterion. Criteria 1 to 9 write
// their CSV outputs under <output-dir>/run1; criterion 10 repeats them under
// <output-dir>/run2 and compares the CSV files byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/estimators.hpp"
#include "mfgmajor/experiments.hpp"
#include "mfgmajor/homogeneous.hpp"
#include "mfgmajor/oracle.hpp"
#include "mfgmajor/stackelberg.hpp"
#include "mfgmajor/stats.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mfgmajor;

constexpr std::uint64_t kSeed = 20260101;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path dir;
  int threads = 1;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome(const Context&)> run;
};

MarketParams Quiet(MarketParams p) {
  p.sigma_S = p.sigma_bar = p.sigma_0 = p.sigma_X = 0.0;
  return p;
}

void WriteFile(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  body(out);
  if (!out) throw Error("cannot write " + path.string());
}

CsvTable ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return ReadCsv(in);
}

// Text cells of a CSV with a header line, keyed by column name.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string> Column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("missing column " + name);
    std::vector<std::string> out;
    for (const auto& r : rows) out.push_back(r.at(it - header.begin()));
    return out;
  }
  std::vector<double> Numbers(const std::string& name) const {
    std::vector<double> out;
    for (const auto& c : Column(name)) out.push_back(c == "NA" ? NAN : std::stod(c));
    return out;
  }
};

TextTable ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  TextTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

double SupGap(const StackelbergEquilibrium& x, const StackelbergEquilibrium& y, int last) {
  double m = 0.0;
  for (int k = 0; k <= last; ++k) m = std::max(m, (x.Xi[k] - y.Xi[k]).cwiseAbs().maxCoeff());
  return m;
}

RunResult RunKind(const Context& ctx, const std::string& kind, const std::string& subdir) {
  ConfigBuilder b;
  b.Set("experiment.kind", kind);
  b.Set("experiment.output_dir", (ctx.dir / subdir).string());
  b.Set("experiment.seed", std::to_string(kSeed));
  b.Set("experiment.threads", std::to_string(ctx.threads));
  return RunExperiment(b.Build());
}

// 1. Deterministic oracle equivalence.
Outcome OracleEquivalence(const Context& ctx) {
  const MarketParams p = Quiet(MarketParams());
  std::vector<double> gaps;
  for (int n : {96, 192}) {
    const TimeGrid g(24.0, n);
    const ScenarioPath s = Simulate(p, g, 0, kSeed);
    const StackelbergEquilibrium eq = SolveStackelberg(s, p);
    const BvpSolution bvp = DeterministicBvp(p, g, s.S, s.X0.back(), s.Xbar.back());
    double gap = 0.0;
    WriteFile(ctx.dir / fmt::format("c1_oracle_{}.csv", n), [&](std::ostream& o) {
      WriteCsvRow(o, std::vector<std::string>{"t", "phi0", "N", "phibar", "phi0_oracle",
                                              "N_oracle", "phibar_oracle"});
      for (int k = 0; k <= n; ++k) {
        const Vec3& x = eq.Xi[k];
        const Vec3& y = bvp.path[k].Xi;
        gap = std::max(gap, (x - y).cwiseAbs().maxCoeff());
        WriteCsvRow(o, std::vector<double>{g.t(k), x(0), x(1), x(2), y(0), y(1), y(2)});
      }
    });
    gaps.push_back(gap);
  }
  const bool within = gaps[0] <= 1e-6;
  const bool halves = gaps[1] < gaps[0];
  return {within && halves,
          fmt::format("sup gap {:.3e} at 96 steps (<= 1e-6: {}), {:.3e} at 192 steps "
                      "(reduced: {})",
                      gaps[0], within ? "yes" : "no", gaps[1], halves ? "yes" : "no")};
}

// 2. Reduction to the homogeneous game when a0 = 0.
Outcome HomogeneousConsistency(const Context& ctx) {
  const MarketParams p;  // a0 = 0
  const TimeGrid g(24.0, 96);
  const Ensemble ens(p, g, 0, 20, kSeed);
  double worst = 0.0;
  WriteFile(ctx.dir / "c2_gaps.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"scenario", "gap"});
    for (int r = 0; r < ens.size(); ++r) {
      const ScenarioPath s = ens[r];
      const StackelbergEquilibrium eq = SolveStackelberg(s, p);
      const HomogeneousEquilibrium h = SolveHomogeneous(s, p);
      double gap = 0.0;
      for (int k = 0; k <= 96; ++k) gap = std::max(gap, std::abs(eq.Xi[k](2) - h.phi_bar[k]));
      worst = std::max(worst, gap);
      WriteCsvRow(o, std::vector<double>{static_cast<double>(r), gap});
    }
  });
  return {worst <= 1e-6, fmt::format("max path-wise gap {:.3e} over 20 scenarios (<= 1e-6)", worst)};
}

// 3. Closed form against its martingale form.
Outcome AlgebraicEquivalence(const Context& ctx) {
  const MarketParams p;
  const TimeGrid g(24.0, 96);
  const StackelbergSolver solver(p, g);
  const Ensemble ens(p, g, 0, 100, kSeed);
  double worst = 0.0;
  WriteFile(ctx.dir / "c3_gaps.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"scenario", "gap"});
    for (int r = 0; r < ens.size(); ++r) {
      const ScenarioPath s = ens[r];
      const double gap = SupGap(solver.Solve(s), solver.SolveMartingaleForm(s), 96);
      worst = std::max(worst, gap);
      WriteCsvRow(o, std::vector<double>{static_cast<double>(r), gap});
    }
  });
  return {worst <= 1e-9,
          fmt::format("max path-wise gap {:.3e} over 100 scenarios (<= 1e-9)", worst)};
}

// 4. Penalty limits and terminal tracking.
Outcome LimitRegimes(const Context& ctx) {
  const MarketParams base;
  const TimeGrid g(24.0, 96);
  const int n_sim = 1000;
  const Ensemble ens(base, g, 0, n_sim, kSeed);
  auto with_penalty = [&](double lambda) {
    MarketParams p = base;
    p.lambda = p.lambda0 = lambda;
    return StackelbergSolver(p, g);
  };
  const std::vector<double> lambdas = {1e2, 1e4, 1e6};
  std::vector<StackelbergSolver> solvers;
  for (double l : lambdas) solvers.push_back(with_penalty(l));
  const StackelbergSolver zero = with_penalty(0.0);
  std::vector<std::vector<double>> major(3, std::vector<double>(n_sim)),
      minor(3, std::vector<double>(n_sim));
  double worst_inf = 0.0, worst_zero = 0.0;
  WriteFile(ctx.dir / "c4_limits.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"scenario", "gap_infinite", "gap_zero"});
    for (int r = 0; r < n_sim; ++r) {
      const ScenarioPath s = ens[r];
      StackelbergEquilibrium large(g);
      for (int j = 0; j < 3; ++j) {
        StackelbergEquilibrium eq = solvers[j].Solve(s);
        major[j][r] = std::pow(eq.Xi[96](0) - s.X0[96], 2);
        minor[j][r] = std::pow(eq.Xi[96](2) - s.Xbar[96], 2);
        if (j == 2) large = std::move(eq);
      }
      const double gi = SupGap(large, solvers[2].LimitInfinitePenalty(s), 95);
      const double gz = SupGap(zero.Solve(s), zero.LimitNoPenalty(s), 96);
      worst_inf = std::max(worst_inf, gi);
      worst_zero = std::max(worst_zero, gz);
      WriteCsvRow(o, std::vector<double>{static_cast<double>(r), gi, gz});
    }
  });
  std::vector<MeanEstimate> em, en;
  WriteFile(ctx.dir / "c4_tracking.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"lambda", "major", "major_se", "minor", "minor_se"});
    for (int j = 0; j < 3; ++j) {
      em.push_back(EstimateMean(major[j]));
      en.push_back(EstimateMean(minor[j]));
      WriteCsvRow(o, std::vector<double>{lambdas[j], em[j].mean, em[j].se, en[j].mean, en[j].se});
    }
  });
  const bool inf_ok = worst_inf <= 1e-3, zero_ok = worst_zero <= 1e-9;
  const bool mono = em[0].mean > em[1].mean && em[1].mean > em[2].mean &&
                    en[0].mean > en[1].mean && en[1].mean > en[2].mean;
  return {inf_ok && zero_ok && mono,
          fmt::format("lambda 1e6 vs limit {:.3e} (<= 1e-3: {}); lambda 0 vs limit {:.3e} "
                      "(<= 1e-9: {}); tracking major {:.3g} > {:.3g} > {:.3g}, minor {:.3g} > "
                      "{:.3g} > {:.3g} ({})",
                      worst_inf, inf_ok ? "yes" : "no", worst_zero, zero_ok ? "yes" : "no",
                      em[0].mean, em[1].mean, em[2].mean, en[0].mean, en[1].mean, en[2].mean,
                      mono ? "decreasing" : "not decreasing")};
}

// Pass flags of a statistics CSV (name,estimate,se,pass).
std::pair<int, int> Passing(const fs::path& path) {
  const std::vector<double> pass = ReadText(path).Numbers("pass");
  return {static_cast<int>(std::count(pass.begin(), pass.end(), 1.0)),
          static_cast<int>(pass.size())};
}

// 5. Martingale and first-order-condition suite.
Outcome MartingaleFoc(const Context& ctx) {
  RunKind(ctx, "oracle_suite", "c5_oracle");
  const fs::path d = ctx.dir / "c5_oracle";
  const auto [foc, foc_n] = Passing(d / "foc.csv");
  const auto [pert, pert_n] = Passing(d / "foc_perturbed.csv");
  const auto [mart, mart_n] = Passing(d / "martingale.csv");
  const bool ok = foc == foc_n && foc_n == 20 && mart == mart_n && pert < pert_n;
  return {ok, fmt::format("foc {}/{} within 3 SE, martingale {}/{} within 3 SE, perturbed foc "
                          "{}/{} within 3 SE ({})",
                          foc, foc_n, mart, mart_n, pert, pert_n,
                          pert < pert_n ? "detected" : "not detected")};
}

// 6. epsilon-Nash scaling.
Outcome EpsNashScaling(const Context& ctx) {
  RunKind(ctx, "epsnash_scaling", "c6_epsnash");
  const fs::path d = ctx.dir / "c6_epsnash";
  struct Fit {
    bool defined = false;
    double slope = NAN, C = 0.0;
  };
  std::map<std::string, Fit> fits;
  const TextTable fit_table = ReadText(d / "epsnash_fits.csv");
  const auto family = fit_table.Column("family"), defined = fit_table.Column("defined");
  const auto slope = fit_table.Numbers("slope"), c = fit_table.Numbers("C");
  for (std::size_t i = 0; i < family.size(); ++i) {
    fits[family[i]] = defined[i] == "1" ? Fit{true, slope[i], c[i]} : Fit{};
  }
  const TextTable gains = ReadText(d / "epsnash_gains.csv");
  const auto ids = gains.Column("deviation_id");
  const auto Ns = gains.Numbers("N"), gain = gains.Numbers("gain"), se = gains.Numbers("se");
  int violations = 0;
  double major_max = -INFINITY;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const bool is_minor = ids[i] == "minor_best_response";
    const Fit& fit = fits[is_minor ? "minor" : "major"];
    const double bound = (fit.defined ? fit.C : 0.0) / std::sqrt(Ns[i]) + 3.0 * se[i];
    violations += gain[i] > bound;
    if (!is_minor) major_max = std::max(major_max, gain[i]);
  }
  const auto& minor = fits["minor"];
  const auto& major = fits["major"];
  const bool minor_ok = minor.defined && minor.slope <= -0.4;
  const bool major_ok = major.defined ? major.slope <= -0.4 : major_max <= 0.0;
  const std::string major_text =
      major.defined ? fmt::format("major slope {:.3f}", major.slope)
                  : fmt::format("major fit undefined: every major gain <= 0 (max {:.4g}), so "
                                "the bound holds with C = 0",
                                major_max);
  return {minor_ok && major_ok && violations == 0,
          fmt::format("minor slope {} (<= -0.4), C {:.4g}; {}; {} gains above C N^-1/2 + 3 SE",
                      minor.defined ? fmt::format("{:.3f}", minor.slope) : "undefined",
                      minor.C, major_text, violations)};
}

double LeastSquaresSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// 7. Volatility ordering and late increase.
Outcome VolatilityFigure(const Context& ctx) {
  RunKind(ctx, "figure2_left", "c7_figure2");
  const fs::path d = ctx.dir / "c7_figure2";
  const char* files[] = {"volatility_a0-0.9_a-0.1.csv", "volatility_a0-0.5_a-0.5.csv",
                         "volatility_a0-0_a-1.csv"};
  std::vector<std::vector<double>> vol;
  std::vector<double> t;
  for (const char* f : files) {
    const CsvTable table = ReadFile(d / f);
    t = table.ColumnValues("t");
    vol.push_back(table.ColumnValues("sigma_hat"));
  }
  const double T = t.back(), h = kDefaultBandwidth;
  int ordered = 0, total = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < h || t[k] > T - h) continue;
    ++total;
    ordered += vol[0][k] >= vol[1][k] && vol[1][k] >= vol[2][k];
  }
  std::vector<double> slopes;
  for (const auto& v : vol) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] >= 0.75 * T && t[k] <= T - h) x.push_back(t[k]), y.push_back(v[k]);
    }
    slopes.push_back(LeastSquaresSlope(x, y));
  }
  const double frac = static_cast<double>(ordered) / total;
  const bool order_ok = frac >= 0.9;
  const bool rising = std::all_of(slopes.begin(), slopes.end(), [](double s) { return s > 0.0; });
  return {order_ok && rising,
          fmt::format("ordering (0.9,0.1) >= (0.5,0.5) >= (0,1) at {:.1f}% of interior times "
                      "(>= 90%: {}); final-quarter slopes {:.3g}, {:.3g}, {:.3g} ({})",
                      100.0 * frac, order_ok ? "yes" : "no", slopes[0], slopes[1], slopes[2],
                      rising ? "increasing" : "not all increasing")};
}

// 8. Correlation of price and forecast increments.
Outcome CorrelationFigure(const Context& ctx) {
  RunKind(ctx, "figure3", "c8_figure3");
  const fs::path d = ctx.dir / "c8_figure3";
  const CsvTable major = ReadFile(d / "correlation_major.csv");
  const CsvTable total = ReadFile(d / "correlation_total.csv");
  const std::vector<double> t = major.ColumnValues("t");
  const std::vector<double> rm = major.ColumnValues("rho"), rt = total.ColumnValues("rho");
  const double T = 24.0;
  int below = 0, windows = 0;
  double first = 0.0, last = 0.0;
  int n_first = 0, n_last = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(rm[k]) || !std::isfinite(rt[k])) continue;
    ++windows;
    below += std::abs(rm[k]) <= std::abs(rt[k]);
    const double gap = std::abs(std::abs(rt[k]) - std::abs(rm[k]));
    if (t[k] < 0.25 * T) first += gap, ++n_first;
    if (t[k] >= 0.75 * T) last += gap, ++n_last;
  }
  first /= n_first;
  last /= n_last;
  const double frac = static_cast<double>(below) / windows;
  const bool order_ok = frac >= 0.9, shrink = last < first;
  return {order_ok && shrink,
          fmt::format("|rho_major| <= |rho_total| in {}/{} windows ({:.1f}%, >= 90%: {}); mean "
                      "gap first quarter {:.4f}, last quarter {:.4f} ({})",
                      below, windows, 100.0 * frac, order_ok ? "yes" : "no", first, last,
                      shrink ? "shrinks" : "does not shrink")};
}

// 9. Estimator calibration on an arithmetic Brownian motion.
Outcome EstimatorCalibration(const Context& ctx) {
  MarketParams p;
  p.sigma_S = 10.0;
  const TimeGrid g(24.0, 1440);
  const int n_sim = 1000;
  const Ensemble ens(p, g, 0, n_sim, kSeed);
  const std::vector<double> t = g.times();
  std::vector<double> avg(t.size(), 0.0);
  for (int r = 0; r < n_sim; ++r) {
    const std::vector<double> v = KernelVolatility(t, ens[r].S, t);
    for (std::size_t k = 0; k < t.size(); ++k) avg[k] += v[k] / n_sim;
  }
  WriteFile(ctx.dir / "c9_volatility.csv", [&](std::ostream& o) { WriteVolatilityCsv(o, t, avg); });
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < kDefaultBandwidth || t[k] > 24.0 - kDefaultBandwidth) continue;
    lo = std::min(lo, avg[k]);
    hi = std::max(hi, avg[k]);
  }
  const bool cal = lo >= 9.0 && hi <= 11.0;
  const bool kernel = Epanechnikov(0.0) == 0.75;
  return {cal && kernel, fmt::format("interior average in [{:.4f}, {:.4f}] (10 +- 10%: {}); "
                                     "K(0) = {}",
                                     lo, hi, cal ? "yes" : "no", Epanechnikov(0.0))};
}

std::map<std::string, std::string> CsvFiles(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string output_dir = "acceptance_out";
  int threads = 0;
  std::vector<int> only;
  app.add_option("-o,--output-dir", output_dir, "Directory for the CSV outputs");
  app.add_option("-j,--threads", threads, "Worker threads, 0 = hardware concurrency");
  app.add_option("--only", only, "Run only these criteria (1-9); 10 follows when given")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", 1.0, OracleEquivalence},
      {2, "homogeneous consistency", 1.0, HomogeneousConsistency},
      {3, "algebraic form equivalence", 10.0, AlgebraicEquivalence},
      {4, "limit regimes", 60.0, LimitRegimes},
      {5, "martingale and FOC suite", 300.0, MartingaleFoc},
      {6, "epsilon-Nash scaling", 1800.0, EpsNashScaling},
      {7, "volatility figure", 600.0, VolatilityFigure},
      {8, "correlation figure", 1800.0, CorrelationFigure},
      {9, "estimator calibration", 60.0, EstimatorCalibration},
  };
  auto selected = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  const fs::path root = output_dir;
  fs::remove_all(root);

  bool all = true;
  for (int pass = 1; pass <= 2; ++pass) {
    const Context ctx{root / fmt::format("run{}", pass), threads};
    for (const Criterion& c : criteria) {
      if (!selected(c.id)) continue;
      const auto start = std::chrono::steady_clock::now();
      Outcome o;
      try {
        o = c.run(ctx);
      } catch (const std::exception& e) {
        o = {false, fmt::format("error: {}", e.what())};
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (pass == 2) continue;
      const bool in_time = secs < c.budget_seconds;
      const bool ok = o.pass && in_time;
      all = all && ok;
      std::cout << fmt::format("C{} {}: {}: {}; runtime {:.1f} s (< {:g} s: {})", c.id,
                               ok ? "PASS" : "FAIL", c.name, o.detail, secs, c.budget_seconds,
                               in_time ? "yes" : "no")
                << std::endl;
    }
  }

  const auto first = CsvFiles(root / "run1"), second = CsvFiles(root / "run2");
  int differing = 0;
  for (const auto& [name, body] : first) {
    const auto it = second.find(name);
    differing += it == second.end() || it->second != body;
  }
  differing += static_cast<int>(second.size() > first.size() ? second.size() - first.size() : 0);
  const bool repro = differing == 0 && !first.empty();
  all = all && repro;
  std::cout << fmt::format("C10 {}: reproducibility: {} CSV files compared, {} differ",
                           repro ? "PASS" : "FAIL", first.size(), differing)
            << std::endl;
  return all ? 0 : 1;
}
