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

#include "mfgmajor/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/estimators.hpp"
#include "mfgmajor/homogeneous.hpp"
#include "mfgmajor/nplayer.hpp"
#include "mfgmajor/oracle.hpp"
#include "mfgmajor/scenarios.hpp"
#include "mfgmajor/stackelberg.hpp"
#include "mfgmajor/svg.hpp"
#include "parallel.hpp"

namespace mfgmajor {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::kFigure1, "figure1"},
    {ExperimentKind::kFigure2Left, "figure2_left"},
    {ExperimentKind::kFigure3, "figure3"},
    {ExperimentKind::kEpsNashScaling, "epsnash_scaling"},
    {ExperimentKind::kOracleSuite, "oracle_suite"},
    {ExperimentKind::kCustom, "custom"},
};

const std::pair<Task, const char*> kTasks[] = {
    {Task::kSimulate, "simulate"}, {Task::kEquilibrium, "equilibrium"},
    {Task::kHomogeneous, "homogeneous"}, {Task::kEpsNash, "epsnash"},
    {Task::kEstimate, "estimate"}, {Task::kOracle, "oracle"},
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& text) {
  const std::string s = Trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, fmt::format("expected a number, got '{}'", text));
  }
  return v;
}

template <class Int>
Int ParseInteger(const std::string& key, const std::string& text) {
  const std::string s = Trim(text);
  Int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, fmt::format("expected an integer, got '{}'", text));
  }
  return v;
}

struct KeySpec {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

KeySpec Real(const char* key, double ExperimentConfig::*field) {
  return {key,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*field = ParseDouble(k, v);
          },
          [field](const ExperimentConfig& c) { return FormatNumber(c.*field); }};
}

KeySpec Market(const char* key, double MarketParams::*field) {
  return {key,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.params.*field = ParseDouble(k, v);
          },
          [field](const ExperimentConfig& c) { return FormatNumber(c.params.*field); }};
}

KeySpec Liquidity(const char* key, double LiquiditySchedule::*field) {
  return {key,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.params.liquidity.*field = ParseDouble(k, v);
          },
          [field](const ExperimentConfig& c) {
            return FormatNumber(c.params.liquidity.*field);
          }};
}

KeySpec Integer(const char* key, int ExperimentConfig::*field) {
  return {key,
          [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*field = ParseInteger<int>(k, v);
          },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

KeySpec Text(const char* key, std::string ExperimentConfig::*field) {
  return {key,
          [field](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.*field = Trim(v);
          },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

const std::vector<KeySpec>& Registry() {
  static const std::vector<KeySpec> keys = {
      {"experiment.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Trim(v);
         for (const auto& [kind, name] : kKinds) {
           if (s == name) {
             c.kind = kind;
             return;
           }
         }
         throw ConfigError(k, fmt::format("unknown experiment kind '{}'", s));
       },
       [](const ExperimentConfig& c) { return std::string(ToString(c.kind)); }},
      Text("experiment.output_dir", &ExperimentConfig::output_dir),
      {"experiment.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed = ParseInteger<std::uint64_t>(k, v);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      Integer("experiment.n_sim", &ExperimentConfig::n_sim),
      Integer("experiment.n_minor", &ExperimentConfig::n_minor),
      Integer("experiment.threads", &ExperimentConfig::threads),
      {"experiment.tasks",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.tasks.clear();
         for (const auto& name : SplitList(v)) {
           try {
             c.tasks.push_back(ParseTask(name));
           } catch (const ConfigError& e) {
             throw ConfigError(k, e.what());
           }
         }
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.tasks.size(); ++i) {
           s += (i ? "," : "") + std::string(ToString(c.tasks[i]));
         }
         return s;
       }},
      Text("experiment.scenario", &ExperimentConfig::scenario),
      Integer("grid.n_steps", &ExperimentConfig::n_steps),
      Liquidity("grid.horizon", &LiquiditySchedule::horizon),
      Market("market.a", &MarketParams::a),
      Market("market.a0", &MarketParams::a0),
      Market("market.lambda", &MarketParams::lambda),
      Market("market.lambda0", &MarketParams::lambda0),
      Market("market.S0", &MarketParams::S0),
      Market("market.sigma_S", &MarketParams::sigma_S),
      Market("market.Xbar0", &MarketParams::Xbar0),
      Market("market.sigma_bar", &MarketParams::sigma_bar),
      Market("market.X0_0", &MarketParams::X0_0),
      Market("market.sigma_0", &MarketParams::sigma_0),
      Market("market.Xcheck0", &MarketParams::Xcheck0),
      Market("market.sigma_X", &MarketParams::sigma_X),
      Liquidity("liquidity.alpha", &LiquiditySchedule::alpha_slope),
      Liquidity("liquidity.beta", &LiquiditySchedule::alpha_intercept),
      Liquidity("liquidity.alpha0", &LiquiditySchedule::alpha0_slope),
      Liquidity("liquidity.beta0", &LiquiditySchedule::alpha0_intercept),
      Real("estimators.bandwidth", &ExperimentConfig::bandwidth),
      Real("estimators.window", &ExperimentConfig::window),
      Real("estimators.forecast_sign", &ExperimentConfig::forecast_sign),
      Text("estimators.input", &ExperimentConfig::input),
      Real("figure1.homogeneous_a", &ExperimentConfig::homogeneous_a),
      {"figure2.weights",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.weight_presets.clear();
         for (const auto& item : SplitList(v)) {
           const auto colon = item.find(':');
           if (colon == std::string::npos) {
             throw ConfigError(k, fmt::format("expected a0:a pairs, got '{}'", item));
           }
           c.weight_presets.emplace_back(ParseDouble(k, item.substr(0, colon)),
                                         ParseDouble(k, item.substr(colon + 1)));
         }
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.weight_presets.size(); ++i) {
           s += fmt::format("{}{}:{}", i ? "," : "", FormatNumber(c.weight_presets[i].first),
                            FormatNumber(c.weight_presets[i].second));
         }
         return s;
       }},
      {"epsnash.sizes",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sizes.clear();
         for (const auto& item : SplitList(v)) c.sizes.push_back(ParseInteger<int>(k, item));
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.sizes.size(); ++i) {
           s += (i ? "," : "") + std::to_string(c.sizes[i]);
         }
         return s;
       }},
      Integer("epsnash.order", &ExperimentConfig::quadrature_order),
      Integer("oracle.n_test_processes", &ExperimentConfig::n_test_processes),
      Integer("oracle.substeps", &ExperimentConfig::oracle_substeps),
  };
  return keys;
}

const KeySpec& Lookup(const std::string& key) {
  for (const auto& spec : Registry()) {
    if (key == spec.key) return spec;
  }
  throw ConfigError(key, "unknown configuration key");
}

void ApplyPreset(ExperimentConfig* c) {
  switch (c->kind) {
    case ExperimentKind::kFigure1:
      c->params.a0 = 0.5;
      c->params.a = 0.5;
      break;
    case ExperimentKind::kFigure2Left:
      c->n_sim = 1000;
      c->n_steps = 1440;
      break;
    case ExperimentKind::kFigure3:
      c->params.a0 = 0.5;
      c->params.a = 0.5;
      c->n_sim = 50000;
      break;
    case ExperimentKind::kEpsNashScaling:
    case ExperimentKind::kOracleSuite:
      c->n_sim = 10000;
      break;
    case ExperimentKind::kCustom:
      break;
  }
}

}  // namespace

const char* ToString(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "custom";
}

const char* ToString(Task task) {
  for (const auto& [t, name] : kTasks) {
    if (t == task) return name;
  }
  return "simulate";
}

Task ParseTask(const std::string& name) {
  for (const auto& [t, n] : kTasks) {
    if (name == n) return t;
  }
  throw ConfigError("experiment.tasks", fmt::format("unknown task '{}'", name));
}

void ConfigBuilder::LoadString(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}", e.line()), e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section, "key outside a [section]");
    }
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      Lookup(key);
      entries_.emplace_back(key, value.get_value<std::string>());
    }
  }
}

void ConfigBuilder::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open configuration file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  LoadString(buffer.str());
}

void ConfigBuilder::Set(const std::string& key, const std::string& value) {
  Lookup(key);
  entries_.emplace_back(key, value);
}

ExperimentConfig ConfigBuilder::Build() const {
  ExperimentConfig config;
  for (const auto& [key, value] : entries_) {
    if (key == "experiment.kind") Lookup(key).set(config, key, value);
  }
  ApplyPreset(&config);
  for (const auto& [key, value] : entries_) Lookup(key).set(config, key, value);
  return config;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& spec : Registry()) keys.emplace_back(spec.key);
  return keys;
}

std::string CanonicalConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& spec : Registry()) out += fmt::format("{} = {}\n", spec.key, spec.get(config));
  return out;
}

std::uint64_t Fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

bool UsesCorrelations(const ExperimentConfig& c) {
  return c.kind == ExperimentKind::kFigure3 ||
         (c.kind == ExperimentKind::kCustom &&
          std::find(c.tasks.begin(), c.tasks.end(), Task::kEstimate) != c.tasks.end() &&
          c.input.empty());
}

}  // namespace

std::vector<Diagnostic> ValidateConfig(const ExperimentConfig& c) {
  std::vector<Diagnostic> d;
  auto error = [&](const char* key, std::string msg) {
    d.push_back({Diagnostic::Severity::kError, key, std::move(msg)});
  };
  auto warn = [&](const char* key, std::string msg) {
    d.push_back({Diagnostic::Severity::kWarning, key, std::move(msg)});
  };
  const MarketParams& p = c.params;
  const LiquiditySchedule& l = p.liquidity;
  const std::pair<double, const char*> finite[] = {
      {p.a, "market.a"}, {p.a0, "market.a0"}, {p.lambda, "market.lambda"},
      {p.lambda0, "market.lambda0"}, {p.S0, "market.S0"}, {p.sigma_S, "market.sigma_S"},
      {p.Xbar0, "market.Xbar0"}, {p.sigma_bar, "market.sigma_bar"}, {p.X0_0, "market.X0_0"},
      {p.sigma_0, "market.sigma_0"}, {p.Xcheck0, "market.Xcheck0"},
      {p.sigma_X, "market.sigma_X"}, {l.alpha_slope, "liquidity.alpha"},
      {l.alpha_intercept, "liquidity.beta"}, {l.alpha0_slope, "liquidity.alpha0"},
      {l.alpha0_intercept, "liquidity.beta0"}, {l.horizon, "grid.horizon"},
      {c.bandwidth, "estimators.bandwidth"}, {c.window, "estimators.window"},
      {c.homogeneous_a, "figure1.homogeneous_a"}};
  for (const auto& [v, key] : finite) {
    if (!std::isfinite(v)) error(key, fmt::format("must be finite (got {})", v));
  }
  if (!(p.a > 0.0)) error("market.a", fmt::format("must be positive (got {})", p.a));
  if (p.a0 < 0.0) error("market.a0", fmt::format("must be non-negative (got {})", p.a0));
  if (p.lambda < 0.0) error("market.lambda", fmt::format("must be non-negative (got {})", p.lambda));
  if (p.lambda0 < 0.0) {
    error("market.lambda0", fmt::format("must be non-negative (got {})", p.lambda0));
  }
  const std::pair<double, const char*> vols[] = {{p.sigma_S, "market.sigma_S"},
                                                 {p.sigma_bar, "market.sigma_bar"},
                                                 {p.sigma_0, "market.sigma_0"},
                                                 {p.sigma_X, "market.sigma_X"}};
  for (const auto& [v, key] : vols) {
    if (v < 0.0) error(key, fmt::format("must be non-negative (got {})", v));
  }
  const std::pair<double, const char*> slopes[] = {{l.alpha_slope, "liquidity.alpha"},
                                                   {l.alpha0_slope, "liquidity.alpha0"}};
  for (const auto& [v, key] : slopes) {
    if (v < 0.0) error(key, fmt::format("must be non-negative (got {})", v));
  }
  const std::pair<double, const char*> intercepts[] = {{l.alpha_intercept, "liquidity.beta"},
                                                       {l.alpha0_intercept, "liquidity.beta0"}};
  for (const auto& [v, key] : intercepts) {
    if (v < 0.0) {
      error(key, fmt::format("must be non-negative (got {})", v));
    } else if (v == 0.0) {
      warn(key,
           "intercept 0 makes the trading cost vanish at T; the equilibrium is not unique in "
           "this limit and the solvers will reject it");
    }
  }
  if (!(l.horizon > 0.0)) error("grid.horizon", fmt::format("must be positive (got {})", l.horizon));
  if (c.n_steps < 1) error("grid.n_steps", fmt::format("must be at least 1 (got {})", c.n_steps));
  if (c.n_sim < 1) error("experiment.n_sim", fmt::format("must be at least 1 (got {})", c.n_sim));
  if (c.n_minor < 0) {
    error("experiment.n_minor", fmt::format("must be non-negative (got {})", c.n_minor));
  }
  if (c.threads < 0) {
    error("experiment.threads", fmt::format("must be non-negative (got {})", c.threads));
  }
  if (c.output_dir.empty()) error("experiment.output_dir", "must not be empty");
  if (!(c.bandwidth > 0.0)) {
    error("estimators.bandwidth", fmt::format("must be positive (got {})", c.bandwidth));
  }
  if (!(c.window > 0.0)) {
    error("estimators.window", fmt::format("must be positive (got {})", c.window));
  } else if (c.n_steps >= 1 && l.horizon > 0.0 && UsesCorrelations(c)) {
    const double ratio = c.window / (l.horizon / c.n_steps);
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || ratio < 0.5) {
      error("estimators.window",
            fmt::format("must be a multiple of the grid step {} h", l.horizon / c.n_steps));
    }
  }
  if (c.forecast_sign != 1.0 && c.forecast_sign != -1.0) {
    error("estimators.forecast_sign", fmt::format("must be 1 or -1 (got {})", c.forecast_sign));
  }
  if (!c.input.empty() && !std::filesystem::exists(c.input)) {
    warn("estimators.input", fmt::format("file '{}' does not exist", c.input));
  }
  if (!c.scenario.empty() && !std::filesystem::exists(c.scenario)) {
    warn("experiment.scenario", fmt::format("file '{}' does not exist", c.scenario));
  }
  if (!(c.homogeneous_a > 0.0)) {
    error("figure1.homogeneous_a", fmt::format("must be positive (got {})", c.homogeneous_a));
  }
  for (const auto& [a0, a] : c.weight_presets) {
    if (!(a > 0.0) || !(a0 >= 0.0)) {
      error("figure2.weights", fmt::format("need a > 0 and a0 >= 0 (got {}:{})", a0, a));
    }
  }
  if (c.weight_presets.empty()) error("figure2.weights", "must list at least one a0:a pair");
  if (c.sizes.empty()) error("epsnash.sizes", "must list at least one N");
  for (int n : c.sizes) {
    if (n < 1) error("epsnash.sizes", fmt::format("N must be at least 1 (got {})", n));
  }
  if (c.quadrature_order != 4 && c.quadrature_order != 8 && c.quadrature_order != 16) {
    error("epsnash.order", fmt::format("must be 4, 8 or 16 (got {})", c.quadrature_order));
  }
  if (c.n_test_processes < 0) {
    error("oracle.n_test_processes",
          fmt::format("must be non-negative (got {})", c.n_test_processes));
  }
  if (c.oracle_substeps < 1) {
    error("oracle.substeps", fmt::format("must be at least 1 (got {})", c.oracle_substeps));
  }
  return d;
}

std::vector<Diagnostic> ValidateEntries(const ConfigBuilder& builder) {
  try {
    return ValidateConfig(builder.Build());
  } catch (const ConfigError& e) {
    std::string message = e.what();
    const std::string prefix = e.key() + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    return {{Diagnostic::Severity::kError, e.key(), message}};
  }
}

namespace {

class Output {
 public:
  Output(const ExperimentConfig& config, RunResult* result) : result_(result) {
    const char* env = std::getenv("MFGM_OUTPUT_DIR");
    result_->output_dir = env && *env ? env : config.output_dir;
    std::filesystem::create_directories(result_->output_dir);
  }

  template <class F>
  void Write(const std::string& name, F&& body) {
    const auto path = std::filesystem::path(result_->output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    body(out);
    out.flush();
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
    result_->files.push_back(name);
  }

 private:
  RunResult* result_;
};

void Check(const ExperimentConfig& c) {
  for (const auto& d : ValidateConfig(c)) {
    if (d.severity == Diagnostic::Severity::kError) throw ConfigError(d.key, d.message);
  }
}

ScenarioPath LoadOrSimulate(const ExperimentConfig& c) {
  if (c.scenario.empty()) return Simulate(c.params, c.grid(), c.n_minor, c.seed);
  std::ifstream in(c.scenario, std::ios::binary);
  if (!in) throw ConfigError("experiment.scenario", "cannot open scenario file");
  ScenarioPath s = ReadScenarioCsv(in);
  if (std::abs(s.grid.horizon() - c.params.horizon()) > 1e-9 * c.params.horizon()) {
    throw ConfigError("experiment.scenario", "scenario horizon differs from grid.horizon");
  }
  return s;
}

std::vector<double> Scaled(std::vector<double> v, double c) {
  for (double& x : v) x *= c;
  return v;
}

std::vector<double> Column(const std::vector<CorrelationPoint>& rows,
                           double CorrelationPoint::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

// Ensemble average of the kernel volatility of the equilibrium price.
std::vector<double> AverageVolatility(const ExperimentConfig& c, const MarketParams& p) {
  const TimeGrid grid = c.grid();
  const StackelbergSolver solver(p, grid);
  const Ensemble ens(p, grid, 0, c.n_sim, c.seed);
  const std::vector<double> times = grid.times();
  std::vector<std::vector<double>> per(c.n_sim);
  ParallelFor(c.n_sim, c.threads, [&](int r) {
    per[r] = KernelVolatility(times, solver.Solve(ens[r]).price, times, c.bandwidth);
  });
  std::vector<double> avg(times.size(), 0.0);
  for (const auto& v : per) {
    for (std::size_t k = 0; k < v.size(); ++k) avg[k] += v[k];
  }
  for (double& v : avg) v /= c.n_sim;
  return avg;
}

struct Correlations {
  std::vector<CorrelationPoint> major, total;
};

Correlations PriceForecastCorrelations(const ExperimentConfig& c, const MarketParams& p) {
  const TimeGrid grid = c.grid();
  const StackelbergSolver solver(p, grid);
  const Ensemble ens(p, grid, 0, c.n_sim, c.seed);
  CorrelationStudy major(grid.times(), c.window), total(grid.times(), c.window);
  struct Inc {
    std::vector<double> dmajor, dtotal, dprice;
  };
  std::vector<Inc> inc(c.n_sim);
  ParallelFor(c.n_sim, c.threads, [&](int r) {
    const ScenarioPath s = ens[r];
    const StackelbergEquilibrium eq = solver.Solve(s);
    std::vector<double> sum(s.X0.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = s.X0[k] + s.Xbar[k];
    inc[r] = {Scaled(major.Increments(s.X0), c.forecast_sign),
              Scaled(total.Increments(sum), c.forecast_sign), major.Increments(eq.price)};
  });
  for (const auto& x : inc) {
    major.AddIncrements(x.dmajor, x.dprice);
    total.AddIncrements(x.dtotal, x.dprice);
  }
  return {major.Finish(), total.Finish()};
}

std::string WeightTag(double a0, double a) {
  return fmt::format("a0-{}_a-{}", FormatNumber(a0), FormatNumber(a));
}

void Figure1(const ExperimentConfig& c, Output& out, RunResult* res) {
  const ScenarioPath s = LoadOrSimulate(c);
  const StackelbergEquilibrium eq = SolveStackelberg(s, c.params);
  MarketParams hp = c.params;
  hp.a = c.homogeneous_a;
  hp.a0 = 0.0;
  const HomogeneousEquilibrium h = SolveHomogeneous(s, hp);
  const std::vector<double> t = s.grid.times(), phi0 = eq.phi0(), phibar = eq.phibar();
  out.Write("positions.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"t", "X0", "Xbar", "phi0", "phibar",
                                            "phibar_homogeneous"});
    for (std::size_t k = 0; k < t.size(); ++k) {
      WriteCsvRow(o, std::vector<double>{t[k], s.X0[k], s.Xbar[k], phi0[k], phibar[k],
                                         h.phi_bar[k]});
    }
  });
  LinePlot plot{"Forecasts and equilibrium positions", "t (h)", "MWh", {}};
  plot.series.push_back({"X0 (major forecast)", t, s.X0, {}, {}, false});
  plot.series.push_back({"Xbar (common forecast)", t, s.Xbar, {}, {}, false});
  plot.series.push_back({"phi0 (major)", t, phi0, {}, {}, true});
  plot.series.push_back({"phibar (minors)", t, phibar, {}, {}, true});
  plot.series.push_back({"phibar (identical agents)", t, h.phi_bar, {}, {}, true});
  out.Write("positions.svg", [&](std::ostream& o) { WriteSvg(o, plot); });
  res->summary.push_back(fmt::format("terminal phi0 = {:.4f}, phibar = {:.4f}, homogeneous = {:.4f}",
                                     phi0.back(), phibar.back(), h.phi_bar.back()));
}

void Figure2Left(const ExperimentConfig& c, Output& out, RunResult* res) {
  const std::vector<double> t = c.grid().times();
  LinePlot plot{"Kernel volatility of the equilibrium price", "t (h)", "sigma_hat", {}};
  for (const auto& [a0, a] : c.weight_presets) {
    MarketParams p = c.params;
    p.a0 = a0;
    p.a = a;
    const std::vector<double> vol = AverageVolatility(c, p);
    out.Write(fmt::format("volatility_{}.csv", WeightTag(a0, a)),
              [&](std::ostream& o) { WriteVolatilityCsv(o, t, vol); });
    plot.series.push_back({fmt::format("a0 = {}, a = {}", a0, a), t, vol, {}, {}, false});
    double interior = 0.0;
    int count = 0;
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      if (std::isfinite(vol[k])) interior += vol[k], ++count;
    }
    res->summary.push_back(fmt::format("a0 = {}, a = {}: mean interior sigma_hat = {:.4f}", a0, a,
                                       count ? interior / count : kNaN));
  }
  out.Write("volatility.svg", [&](std::ostream& o) { WriteSvg(o, plot); });
}

void Figure3(const ExperimentConfig& c, Output& out, RunResult* res) {
  const Correlations r = PriceForecastCorrelations(c, c.params);
  out.Write("correlation_major.csv", [&](std::ostream& o) { WriteCorrelationCsv(o, r.major); });
  out.Write("correlation_total.csv", [&](std::ostream& o) { WriteCorrelationCsv(o, r.total); });
  const std::vector<double> t = Column(r.major, &CorrelationPoint::t);
  LinePlot plot{"Correlation of price and forecast increments", "t (h)", "rho", {}};
  plot.series.push_back({"major forecast", t, Column(r.major, &CorrelationPoint::rho),
                         Column(r.major, &CorrelationPoint::ci_lo),
                         Column(r.major, &CorrelationPoint::ci_hi), false});
  plot.series.push_back({"total forecast", Column(r.total, &CorrelationPoint::t),
                         Column(r.total, &CorrelationPoint::rho), {}, {}, false});
  out.Write("correlation.svg", [&](std::ostream& o) { WriteSvg(o, plot); });
  int below = 0;
  for (std::size_t w = 0; w < r.major.size(); ++w) {
    if (std::abs(r.major[w].rho) <= std::abs(r.total[w].rho)) ++below;
  }
  res->summary.push_back(fmt::format("|rho_major| <= |rho_total| in {} of {} windows", below,
                                     r.major.size()));
}

void Simulation(const ExperimentConfig& c, Output& out, RunResult*) {
  const ScenarioPath s = LoadOrSimulate(c);
  out.Write("scenario.csv", [&](std::ostream& o) { WriteScenarioCsv(o, s); });
}

void Equilibrium(const ExperimentConfig& c, Output& out, RunResult* res) {
  const ScenarioPath s = LoadOrSimulate(c);
  const StackelbergSolver solver(c.params, s.grid);
  StackelbergEquilibrium eq = solver.Solve(s);
  if (s.n_minor() > 0) eq.phi_i = solver.MinorStrategy(s, eq, 0);
  out.Write("stackelberg.csv", [&](std::ostream& o) { WriteStackelbergCsv(o, eq); });
  res->summary.push_back(fmt::format("terminal phi0 = {:.6f}, phibar = {:.6f}, price = {:.6f}",
                                     eq.phi0().back(), eq.phibar().back(), eq.price.back()));
}

void Homogeneous(const ExperimentConfig& c, Output& out, RunResult* res) {
  const ScenarioPath s = LoadOrSimulate(c);
  std::optional<int> agent;
  if (s.n_minor() > 0) agent = 0;
  const HomogeneousEquilibrium h = SolveHomogeneous(s, c.params, agent);
  out.Write("homogeneous.csv", [&](std::ostream& o) { WriteHomogeneousCsv(o, h); });
  res->summary.push_back(fmt::format("terminal phibar = {:.6f}, price = {:.6f}", h.phi_bar.back(),
                                     h.price.back()));
}

void EpsNash(const ExperimentConfig& c, Output& out, RunResult* res) {
  ScalingOptions opt;
  opt.sizes = c.sizes;
  opt.n_sim = c.n_sim;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.order = c.quadrature_order;
  const ScalingStudy study = RunScalingStudy(c.params, c.grid(), opt);
  out.Write("epsnash_gains.csv", [&](std::ostream& o) { WriteGainsCsv(o, study.rows); });
  out.Write("epsnash_fits.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"family", "defined", "slope", "C"});
    for (const auto& f : study.fits) {
      WriteCsvRow(o, std::vector<std::string>{f.family, f.defined ? "1" : "0",
                                              FormatNumber(f.defined ? f.slope : kNaN),
                                              FormatNumber(f.defined ? f.C : kNaN)});
    }
  });
  for (const auto& f : study.fits) {
    res->summary.push_back(f.defined ? fmt::format("{} gains: slope {:.4f}, C {:.6g}", f.family,
                                                   f.slope, f.C)
                                     : fmt::format("{} gains: fit undefined (some gain <= 0)",
                                                   f.family));
  }
  for (const auto& w : study.warnings) res->warnings.push_back(w);
}

void Estimate(const ExperimentConfig& c, Output& out, RunResult* res) {
  if (!c.input.empty()) {
    std::ifstream in(c.input, std::ios::binary);
    if (!in) throw ConfigError("estimators.input", "cannot open input series");
    const TimeSeries s = ReadTimeSeriesCsv(in);
    out.Write("volatility.csv", [&](std::ostream& o) {
      WriteVolatilityCsv(o, s.t, KernelVolatility(s.t, s.value, s.t, c.bandwidth));
    });
    const double dt = s.t.size() > 1 ? s.t[1] - s.t[0] : 0.0;
    for (std::size_t k = 1; k < s.t.size(); ++k) {
      if (std::abs((s.t[k] - s.t[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
        res->warnings.push_back("input is not evenly spaced; increment estimators skipped");
        return;
      }
    }
    const IncrementSeries inc = IncrementSeries::FromLevels(dt, s.value);
    out.Write("increment_volatility.csv", [&](std::ostream& o) {
      WriteCsvRow(o, std::vector<std::string>{"estimator", "value"});
      WriteCsvRow(o, std::vector<std::string>{"forecast_volatility",
                                              FormatNumber(ForecastVolatility(inc))});
      WriteCsvRow(o, std::vector<std::string>{"realized_volatility",
                                              FormatNumber(RealizedVolatility(inc))});
    });
    return;
  }
  const std::vector<double> vol = AverageVolatility(c, c.params);
  out.Write("volatility.csv", [&](std::ostream& o) { WriteVolatilityCsv(o, c.grid().times(), vol); });
  const Correlations r = PriceForecastCorrelations(c, c.params);
  out.Write("correlation_major.csv", [&](std::ostream& o) { WriteCorrelationCsv(o, r.major); });
  out.Write("correlation_total.csv", [&](std::ostream& o) { WriteCorrelationCsv(o, r.total); });
}

void Oracle(const ExperimentConfig& c, Output& out, RunResult* res) {
  const TimeGrid grid = c.grid();
  MarketParams quiet = c.params;
  quiet.sigma_S = quiet.sigma_bar = quiet.sigma_0 = quiet.sigma_X = 0.0;
  const ScenarioPath s = Simulate(quiet, grid, 0, c.seed);
  const StackelbergEquilibrium eq = SolveStackelberg(s, quiet);
  const BvpSolution bvp =
      DeterministicBvp(quiet, grid, s.S, s.X0.back(), s.Xbar.back(), c.oracle_substeps);
  double gap = 0.0;
  out.Write("oracle_bvp.csv", [&](std::ostream& o) {
    WriteCsvRow(o, std::vector<std::string>{"t", "phi0", "N", "phibar", "phi0_oracle",
                                            "N_oracle", "phibar_oracle"});
    for (int k = 0; k < grid.n_points(); ++k) {
      const Vec3& x = eq.Xi[k];
      const Vec3& y = bvp.path[k].Xi;
      gap = std::max(gap, (x - y).cwiseAbs().maxCoeff());
      WriteCsvRow(o, std::vector<double>{grid.t(k), x(0), x(1), x(2), y(0), y(1), y(2)});
    }
  });
  res->summary.push_back(fmt::format("deterministic oracle gap {:.3e} (second Newton step {:.3e})",
                                     gap, bvp.second_step));

  const StackelbergSolver solver(c.params, grid);
  const Ensemble ens(c.params, grid, 0, c.n_sim, c.seed);
  const FocReport foc = FocTest(solver, ens, c.n_test_processes, 0.0, c.threads);
  out.Write("foc.csv", [&](std::ostream& o) { WriteFocCsv(o, foc); });
  const FocReport shifted = FocTest(solver, ens, c.n_test_processes, 1.0, c.threads);
  out.Write("foc_perturbed.csv", [&](std::ostream& o) { WriteFocCsv(o, shifted); });

  MartingaleResidualTest mt({"M0", "M", "Ybar"});
  std::vector<std::vector<std::vector<double>>> paths(c.n_sim);
  ParallelFor(c.n_sim, c.threads, [&](int r) {
    const StackelbergEquilibrium e = solver.Solve(ens[r]);
    paths[r] = {e.M0(), e.M(), e.Ybar()};
  });
  for (int r = 0; r < c.n_sim; ++r) mt.Add(ens[r], paths[r]);
  const MartingaleReport mart = mt.Finish();
  out.Write("martingale.csv", [&](std::ostream& o) { WriteMartingaleCsv(o, mart); });
  res->summary.push_back(fmt::format("foc test {}, perturbed foc test {}, martingale test {}",
                                     foc.pass ? "PASS" : "FAIL",
                                     shifted.pass ? "PASS (not detected)" : "FAIL (detected)",
                                     mart.pass ? "PASS" : "FAIL"));
}

using TaskFn = void (*)(const ExperimentConfig&, Output&, RunResult*);

TaskFn TaskFunction(Task t) {
  switch (t) {
    case Task::kSimulate: return Simulation;
    case Task::kEquilibrium: return Equilibrium;
    case Task::kHomogeneous: return Homogeneous;
    case Task::kEpsNash: return EpsNash;
    case Task::kEstimate: return Estimate;
    case Task::kOracle: return Oracle;
  }
  return Simulation;
}

void WriteManifest(const ExperimentConfig& c, Output& out, RunResult* res) {
  // Output location and thread count do not affect results.
  ExperimentConfig hashed = c;
  hashed.output_dir = "";
  hashed.threads = 0;
  const std::string canonical = CanonicalConfig(c);
  const std::uint64_t hash = Fnv1a64(CanonicalConfig(hashed));
  std::vector<std::string> files = res->files;
  out.Write("manifest.txt", [&](std::ostream& o) {
    o << "version = " << kVersion << "\n";
    o << "kind = " << ToString(c.kind) << "\n";
    o << "seed = " << c.seed << "\n";
    o << fmt::format("config_hash = {:016x}\n", hash);
    o << canonical;
    for (const auto& f : files) o << "output = " << f << "\n";
    for (const auto& s : res->summary) o << "summary = " << s << "\n";
    for (const auto& w : res->warnings) o << "warning = " << w << "\n";
  });
}

}  // namespace

RunResult RunTask(const ExperimentConfig& config, Task task) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::kCustom;
  c.tasks = {task};
  return RunExperiment(c);
}

RunResult RunExperiment(const ExperimentConfig& config) {
  Check(config);
  RunResult res;
  Output out(config, &res);
  switch (config.kind) {
    case ExperimentKind::kFigure1: Figure1(config, out, &res); break;
    case ExperimentKind::kFigure2Left: Figure2Left(config, out, &res); break;
    case ExperimentKind::kFigure3: Figure3(config, out, &res); break;
    case ExperimentKind::kEpsNashScaling: EpsNash(config, out, &res); break;
    case ExperimentKind::kOracleSuite: Oracle(config, out, &res); break;
    case ExperimentKind::kCustom:
      for (Task t : config.tasks) TaskFunction(t)(config, out, &res);
      break;
  }
  WriteManifest(config, out, &res);
  return res;
}

}  // namespace mfgmajor
