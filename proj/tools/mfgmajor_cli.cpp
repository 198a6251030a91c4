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

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mfgmajor/mfgmajor.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

struct ConfigDeleter {
  void operator()(mfgm_config* c) const { mfgm_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<mfgm_config, ConfigDeleter>;

int Report(mfgm_status status) {
  std::fprintf(stderr, "error (%s): %s\n", mfgm_status_string(status), mfgm_last_error());
  return status == MFGM_ERR_CONFIG ? kExitConfig : kExitError;
}

// "--section.key value" or "--section.key=value" pairs left over by CLI11.
std::vector<std::pair<std::string, std::string>> ParseOverrides(std::vector<std::string> args) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos) {
      throw CLI::ExtrasError({a});
    }
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else if (i + 1 < args.size()) {
      out.emplace_back(a.substr(2), args[++i]);
    } else {
      throw CLI::ArgumentMismatch(a + " needs a value");
    }
  }
  return out;
}

struct Options {
  std::string config_file;
  std::string output_dir;
  int threads = -1;
  std::vector<std::pair<std::string, std::string>> overrides;
};

mfgm_status BuildConfig(const Options& o, ConfigPtr* out) {
  mfgm_config* raw = nullptr;
  mfgm_status s = mfgm_config_create(&raw);
  if (s != MFGM_OK) return s;
  out->reset(raw);
  if (!o.config_file.empty() && (s = mfgm_config_load_file(raw, o.config_file.c_str())) != MFGM_OK) {
    return s;
  }
  if (!o.output_dir.empty() &&
      (s = mfgm_config_set(raw, "experiment.output_dir", o.output_dir.c_str())) != MFGM_OK) {
    return s;
  }
  if (o.threads >= 0 &&
      (s = mfgm_config_set(raw, "experiment.threads", std::to_string(o.threads).c_str())) !=
          MFGM_OK) {
    return s;
  }
  for (const auto& [k, v] : o.overrides) {
    if ((s = mfgm_config_set(raw, k.c_str(), v.c_str())) != MFGM_OK) return s;
  }
  return MFGM_OK;
}

void PrintResult(const mfgm_result* r) {
  for (size_t i = 0; i < mfgm_result_warning_count(r); ++i) {
    std::fprintf(stderr, "warning: %s\n", mfgm_result_warning(r, i));
  }
  for (size_t i = 0; i < mfgm_result_summary_count(r); ++i) {
    std::printf("%s\n", mfgm_result_summary(r, i));
  }
  for (size_t i = 0; i < mfgm_result_file_count(r); ++i) {
    std::printf("wrote %s/%s\n", mfgm_result_output_dir(r), mfgm_result_file(r, i));
  }
}

int Run(const Options& o, const char* task) {
  ConfigPtr config;
  mfgm_status s = BuildConfig(o, &config);
  if (s != MFGM_OK) return Report(s);
  mfgm_diagnostics* d = nullptr;
  if ((s = mfgm_config_validate(config.get(), &d)) != MFGM_OK) return Report(s);
  for (size_t i = 0; i < mfgm_diagnostics_count(d); ++i) {
    std::fprintf(stderr, "%s: %s: %s\n", mfgm_diagnostics_is_error(d, i) ? "error" : "warning",
                 mfgm_diagnostics_key(d, i), mfgm_diagnostics_message(d, i));
  }
  const bool bad = mfgm_diagnostics_error_count(d) > 0;
  mfgm_diagnostics_destroy(d);
  if (bad) return kExitConfig;
  mfgm_result* r = nullptr;
  s = task ? mfgm_run_task(config.get(), task, &r) : mfgm_run(config.get(), &r);
  if (s != MFGM_OK) return Report(s);
  PrintResult(r);
  mfgm_result_destroy(r);
  return 0;
}

int Validate(const Options& o) {
  ConfigPtr config;
  mfgm_status s = BuildConfig(o, &config);
  mfgm_diagnostics* d = nullptr;
  if (s == MFGM_OK) s = mfgm_config_validate(config.get(), &d);
  if (s != MFGM_OK) {
    // Parse failures are diagnostics too.
    std::printf("error: %s\n", mfgm_last_error());
    return kExitConfig;
  }
  const size_t n = mfgm_diagnostics_count(d);
  for (size_t i = 0; i < n; ++i) {
    std::printf("%s: %s: %s\n", mfgm_diagnostics_is_error(d, i) ? "error" : "warning",
                mfgm_diagnostics_key(d, i), mfgm_diagnostics_message(d, i));
  }
  if (n == 0) std::printf("ok\n");
  const bool bad = mfgm_diagnostics_error_count(d) > 0;
  mfgm_diagnostics_destroy(d);
  return bad ? kExitConfig : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg mean field equilibria for intraday electricity markets"};
  app.set_version_flag("--version", std::string(mfgm_version()));
  app.require_subcommand(1);
  app.footer(
      "Any configuration key can be overridden with --section.key VALUE; run 'keys' to list "
      "them.");

  Options opt;
  std::vector<CLI::App*> with_overrides;
  auto add_common = [&](CLI::App* sub, bool positional_config) {
    sub->allow_extras();
    if (positional_config) {
      sub->add_option("config", opt.config_file, "INI configuration file")
          ->required()
          ->check(CLI::ExistingFile);
    } else {
      sub->add_option("-c,--config", opt.config_file, "INI configuration file")
          ->check(CLI::ExistingFile);
    }
    sub->add_option("-o,--output-dir", opt.output_dir, "Same as --experiment.output_dir");
    sub->add_option("-j,--threads", opt.threads, "Same as --experiment.threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    with_overrides.push_back(sub);
  };

  const std::pair<const char*, const char*> tasks[] = {
      {"simulate", "Simulate one scenario (scenario.csv)"},
      {"equilibrium", "Stackelberg equilibrium on one scenario (stackelberg.csv)"},
      {"homogeneous", "Identical-agent equilibrium on one scenario (homogeneous.csv)"},
      {"epsnash", "Finite-N deviation gains and their scaling fit"},
      {"estimate", "Kernel volatility and correlation estimates"},
      {"oracle", "Deterministic oracle, first-order condition and martingale tests"},
  };
  std::vector<std::pair<CLI::App*, const char*>> task_cmds;
  for (const auto& [name, help] : tasks) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, false);
    task_cmds.emplace_back(sub, name);
  }
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a configuration");
  add_common(run, true);
  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without running");
  add_common(validate, true);
  CLI::App* keys = app.add_subcommand("keys", "List configuration keys with default values");

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : with_overrides) {
      if (sub->parsed()) opt.overrides = ParseOverrides(sub->remaining());
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (keys->parsed()) {
    ConfigPtr config;
    if (const mfgm_status s = BuildConfig(opt, &config); s != MFGM_OK) return Report(s);
    std::vector<char> buffer(4096);
    for (size_t i = 0; i < mfgm_config_key_count(); ++i) {
      const char* key = mfgm_config_key(i);
      size_t needed = 0;
      if (mfgm_config_get(config.get(), key, buffer.data(), buffer.size(), &needed) ==
          MFGM_ERR_BUFFER_TOO_SMALL) {
        buffer.resize(needed);
        mfgm_config_get(config.get(), key, buffer.data(), buffer.size(), &needed);
      }
      std::printf("%s = %s\n", key, buffer.data());
    }
    return 0;
  }
  if (validate->parsed()) return Validate(opt);
  if (run->parsed()) return Run(opt, nullptr);
  for (const auto& [sub, name] : task_cmds) {
    if (sub->parsed()) return Run(opt, name);
  }
  return kExitError;
}
