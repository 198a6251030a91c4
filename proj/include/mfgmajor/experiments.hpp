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

#ifndef MFGMAJOR_EXPERIMENTS_HPP_
#define MFGMAJOR_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfgmajor/grid.hpp"
#include "mfgmajor/params.hpp"

namespace mfgmajor {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { kFigure1, kFigure2Left, kFigure3, kEpsNashScaling, kOracleSuite,
                            kCustom };
const char* ToString(ExperimentKind kind);

// Tasks of a custom experiment and of the single-purpose CLI subcommands.
enum class Task { kSimulate, kEquilibrium, kHomogeneous, kEpsNash, kEstimate, kOracle };
const char* ToString(Task task);
Task ParseTask(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kCustom;
  std::string output_dir = "out";
  std::uint64_t seed = 20260101;
  int n_sim = 1000;
  int n_minor = 1;
  int threads = 1;  // 0 = hardware concurrency
  std::vector<Task> tasks;
  std::string scenario;  // scenario CSV used instead of simulating

  MarketParams params;
  int n_steps = 96;

  double bandwidth = 0.08;      // hours
  double window = 0.25;         // correlation increment window, hours
  double forecast_sign = 1.0;   // -1 reads forecasts as production
  std::string input;            // external t,value series for estimate
  double homogeneous_a = 1.0;   // figure1 comparison
  std::vector<std::pair<double, double>> weight_presets = {{0.9, 0.1}, {0.5, 0.5}, {0.0, 1.0}};
  std::vector<int> sizes = {4, 16, 64, 256};
  int quadrature_order = 8;
  int n_test_processes = 20;
  int oracle_substeps = 256;

  TimeGrid grid() const { return TimeGrid(params.horizon(), n_steps); }
};

// Keys are "section.name". Layers, later wins: built-in defaults, the
// preset of experiment.kind, the file, then explicit overrides.
class ConfigBuilder {
 public:
  // INI file; throws ConfigError naming the offending key or line, Error when
  // the file cannot be read.
  void LoadFile(const std::string& path);
  void LoadString(const std::string& text);
  void Set(const std::string& key, const std::string& value);
  ExperimentConfig Build() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// All known keys in canonical order.
std::vector<std::string> ConfigKeys();
// Resolved configuration as "key = value" lines in canonical order.
std::string CanonicalConfig(const ExperimentConfig& config);
std::uint64_t Fnv1a64(const std::string& text);

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kError;
  std::string key;
  std::string message;
};
// Checks every constraint without running anything.
std::vector<Diagnostic> ValidateConfig(const ExperimentConfig& config);
// Parses the entries and validates; parse failures become diagnostics.
std::vector<Diagnostic> ValidateEntries(const ConfigBuilder& builder);

struct RunResult {
  std::string output_dir;
  std::vector<std::string> files;  // relative to output_dir, manifest last
  std::vector<std::string> summary;
  std::vector<std::string> warnings;
};

// Runs the configured experiment; tasks of a custom experiment run in
// order. MFGM_OUTPUT_DIR, when set, replaces experiment.output_dir.
RunResult RunExperiment(const ExperimentConfig& config);
// Runs a single task: a custom experiment with only that task.
RunResult RunTask(const ExperimentConfig& config, Task task);

}  // namespace mfgmajor

#endif  // MFGMAJOR_EXPERIMENTS_HPP_
