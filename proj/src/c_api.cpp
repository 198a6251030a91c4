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

#include "mfgmajor/mfgmajor.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mfgmajor/csv.hpp"
#include "mfgmajor/errors.hpp"
#include "mfgmajor/estimators.hpp"
#include "mfgmajor/experiments.hpp"
#include "mfgmajor/homogeneous.hpp"
#include "mfgmajor/scenarios.hpp"
#include "mfgmajor/stackelberg.hpp"

struct mfgm_config {
  mfgmajor::ConfigBuilder builder;
};

struct mfgm_diagnostics {
  std::vector<mfgmajor::Diagnostic> items;
};

struct mfgm_result {
  mfgmajor::RunResult run;
};

struct mfgm_scenario {
  explicit mfgm_scenario(mfgmajor::ScenarioPath p) : path(std::move(p)) {}
  mfgmajor::ScenarioPath path;
};

// Columns parsed back from the CSV writer so that names match the files.
struct mfgm_solution {
  mfgmajor::CsvTable table;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

mfgm_status Fail(mfgm_status status, std::string message, std::string key = "") {
  g_error = std::move(message);
  g_error_key = std::move(key);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
mfgm_status Guard(F&& body) {
  g_error.clear();
  g_error_key.clear();
  try {
    body();
    return MFGM_OK;
  } catch (const mfgmajor::ConfigError& e) {
    return Fail(MFGM_ERR_CONFIG, e.what(), e.key());
  } catch (const mfgmajor::SingularMatrixError& e) {
    return Fail(MFGM_ERR_SINGULAR, e.what());
  } catch (const mfgmajor::DomainError& e) {
    return Fail(MFGM_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(MFGM_ERR_INTERNAL, "out of memory");
  } catch (const std::ios_base::failure& e) {
    return Fail(MFGM_ERR_IO, e.what());
  } catch (const mfgmajor::Error& e) {
    return Fail(MFGM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return Fail(MFGM_ERR_INTERNAL, e.what());
  }
}

mfgm_status Null(const char* what) {
  return Fail(MFGM_ERR_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

template <class T>
const char* At(const std::vector<T>& v, size_t i) {
  return i < v.size() ? v[i].c_str() : nullptr;
}

mfgm_status CopyColumn(const std::vector<double>& v, const char* name, double* out,
                       size_t capacity) {
  if (capacity < v.size()) {
    return Fail(MFGM_ERR_BUFFER_TOO_SMALL,
                "column '" + std::string(name) + "' needs " + std::to_string(v.size()) +
                    " values");
  }
  std::copy(v.begin(), v.end(), out);
  return MFGM_OK;
}

template <class W>
mfgm_solution* Tabulate(W&& write) {
  std::stringstream buffer;
  write(buffer);
  auto sol = std::make_unique<mfgm_solution>();
  sol->table = mfgmajor::ReadCsv(buffer);
  return sol.release();
}

}  // namespace

extern "C" {

const char* mfgm_version(void) { return mfgmajor::kVersion; }

const char* mfgm_status_string(mfgm_status status) {
  switch (status) {
    case MFGM_OK: return "ok";
    case MFGM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MFGM_ERR_DOMAIN: return "domain error";
    case MFGM_ERR_SINGULAR: return "singular matrix";
    case MFGM_ERR_CONFIG: return "configuration error";
    case MFGM_ERR_IO: return "i/o error";
    case MFGM_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MFGM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mfgm_last_error(void) { return g_error.c_str(); }
const char* mfgm_last_error_key(void) { return g_error_key.c_str(); }

mfgm_status mfgm_config_create(mfgm_config** out) {
  if (!out) return Null("out");
  return Guard([&] { *out = new mfgm_config(); });
}

void mfgm_config_destroy(mfgm_config* config) { delete config; }

mfgm_status mfgm_config_load_file(mfgm_config* config, const char* path) {
  if (!config || !path) return Null("config and path");
  return Guard([&] { config->builder.LoadFile(path); });
}

mfgm_status mfgm_config_load_string(mfgm_config* config, const char* text) {
  if (!config || !text) return Null("config and text");
  return Guard([&] { config->builder.LoadString(text); });
}

mfgm_status mfgm_config_set(mfgm_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return Null("config, key and value");
  return Guard([&] { config->builder.Set(key, value); });
}

mfgm_status mfgm_config_get(const mfgm_config* config, const char* key, char* buffer,
                            size_t capacity, size_t* needed) {
  if (!config || !key) return Null("config and key");
  std::string value;
  const mfgm_status s = Guard([&] {
    const std::string canonical = mfgmajor::CanonicalConfig(config->builder.Build());
    const std::string prefix = std::string(key) + " = ";
    std::istringstream in(canonical);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind(prefix, 0) == 0) {
        value = line.substr(prefix.size());
        return;
      }
    }
    throw mfgmajor::ConfigError(key, "unknown configuration key");
  });
  if (s != MFGM_OK) return s;
  if (needed) *needed = value.size() + 1;
  if (!buffer || capacity < value.size() + 1) {
    return Fail(MFGM_ERR_BUFFER_TOO_SMALL, "value of '" + std::string(key) + "' needs " +
                                               std::to_string(value.size() + 1) + " bytes");
  }
  std::memcpy(buffer, value.c_str(), value.size() + 1);
  return MFGM_OK;
}

size_t mfgm_config_key_count(void) { return mfgmajor::ConfigKeys().size(); }

const char* mfgm_config_key(size_t i) {
  static const std::vector<std::string> keys = mfgmajor::ConfigKeys();
  return At(keys, i);
}

mfgm_status mfgm_config_validate(const mfgm_config* config, mfgm_diagnostics** out) {
  if (!config || !out) return Null("config and out");
  return Guard([&] {
    auto d = std::make_unique<mfgm_diagnostics>();
    d->items = mfgmajor::ValidateEntries(config->builder);
    *out = d.release();
  });
}

size_t mfgm_diagnostics_count(const mfgm_diagnostics* d) { return d ? d->items.size() : 0; }

size_t mfgm_diagnostics_error_count(const mfgm_diagnostics* d) {
  if (!d) return 0;
  size_t n = 0;
  for (const auto& item : d->items) n += item.severity == mfgmajor::Diagnostic::Severity::kError;
  return n;
}

int mfgm_diagnostics_is_error(const mfgm_diagnostics* d, size_t i) {
  return d && i < d->items.size() &&
         d->items[i].severity == mfgmajor::Diagnostic::Severity::kError;
}

const char* mfgm_diagnostics_key(const mfgm_diagnostics* d, size_t i) {
  return d && i < d->items.size() ? d->items[i].key.c_str() : nullptr;
}

const char* mfgm_diagnostics_message(const mfgm_diagnostics* d, size_t i) {
  return d && i < d->items.size() ? d->items[i].message.c_str() : nullptr;
}

void mfgm_diagnostics_destroy(mfgm_diagnostics* d) { delete d; }

mfgm_status mfgm_run(const mfgm_config* config, mfgm_result** out) {
  if (!config || !out) return Null("config and out");
  return Guard([&] {
    auto r = std::make_unique<mfgm_result>();
    r->run = mfgmajor::RunExperiment(config->builder.Build());
    *out = r.release();
  });
}

mfgm_status mfgm_run_task(const mfgm_config* config, const char* task, mfgm_result** out) {
  if (!config || !task || !out) return Null("config, task and out");
  return Guard([&] {
    const mfgmajor::Task t = mfgmajor::ParseTask(task);
    auto r = std::make_unique<mfgm_result>();
    r->run = mfgmajor::RunTask(config->builder.Build(), t);
    *out = r.release();
  });
}

const char* mfgm_result_output_dir(const mfgm_result* r) {
  return r ? r->run.output_dir.c_str() : nullptr;
}
size_t mfgm_result_file_count(const mfgm_result* r) { return r ? r->run.files.size() : 0; }
const char* mfgm_result_file(const mfgm_result* r, size_t i) {
  return r ? At(r->run.files, i) : nullptr;
}
size_t mfgm_result_summary_count(const mfgm_result* r) { return r ? r->run.summary.size() : 0; }
const char* mfgm_result_summary(const mfgm_result* r, size_t i) {
  return r ? At(r->run.summary, i) : nullptr;
}
size_t mfgm_result_warning_count(const mfgm_result* r) { return r ? r->run.warnings.size() : 0; }
const char* mfgm_result_warning(const mfgm_result* r, size_t i) {
  return r ? At(r->run.warnings, i) : nullptr;
}
void mfgm_result_destroy(mfgm_result* r) { delete r; }

mfgm_status mfgm_scenario_simulate(const mfgm_config* config, uint64_t seed,
                                   mfgm_scenario** out) {
  if (!config || !out) return Null("config and out");
  return Guard([&] {
    const mfgmajor::ExperimentConfig c = config->builder.Build();
    c.params.Validate();
    *out = new mfgm_scenario(mfgmajor::Simulate(c.params, c.grid(), c.n_minor, seed));
  });
}

mfgm_status mfgm_scenario_read_csv(const char* path, mfgm_scenario** out) {
  if (!path || !out) return Null("path and out");
  std::ifstream in(path, std::ios::binary);
  if (!in) return Fail(MFGM_ERR_IO, "cannot open '" + std::string(path) + "'");
  return Guard([&] { *out = new mfgm_scenario(mfgmajor::ReadScenarioCsv(in)); });
}

mfgm_status mfgm_scenario_write_csv(const mfgm_scenario* scenario, const char* path) {
  if (!scenario || !path) return Null("scenario and path");
  std::ofstream out(path, std::ios::binary);
  if (!out) return Fail(MFGM_ERR_IO, "cannot write '" + std::string(path) + "'");
  return Guard([&] {
    mfgmajor::WriteScenarioCsv(out, scenario->path);
    out.flush();
    if (!out) throw mfgmajor::Error("failed writing '" + std::string(path) + "'");
  });
}

void mfgm_scenario_destroy(mfgm_scenario* scenario) { delete scenario; }

mfgm_status mfgm_equilibrium_solve(const mfgm_config* config, const mfgm_scenario* scenario,
                                   mfgm_solution** out) {
  if (!config || !scenario || !out) return Null("config, scenario and out");
  return Guard([&] {
    const mfgmajor::ExperimentConfig c = config->builder.Build();
    const mfgmajor::StackelbergSolver solver(c.params, scenario->path.grid);
    mfgmajor::StackelbergEquilibrium eq = solver.Solve(scenario->path);
    if (scenario->path.n_minor() > 0) eq.phi_i = solver.MinorStrategy(scenario->path, eq, 0);
    *out = Tabulate([&](std::ostream& o) { mfgmajor::WriteStackelbergCsv(o, eq); });
  });
}

mfgm_status mfgm_homogeneous_solve(const mfgm_config* config, const mfgm_scenario* scenario,
                                   mfgm_solution** out) {
  if (!config || !scenario || !out) return Null("config, scenario and out");
  return Guard([&] {
    const mfgmajor::ExperimentConfig c = config->builder.Build();
    std::optional<int> agent;
    if (scenario->path.n_minor() > 0) agent = 0;
    const auto eq = mfgmajor::SolveHomogeneous(scenario->path, c.params, agent);
    *out = Tabulate([&](std::ostream& o) { mfgmajor::WriteHomogeneousCsv(o, eq); });
  });
}

void mfgm_solution_destroy(mfgm_solution* solution) { delete solution; }

size_t mfgm_scenario_length(const mfgm_scenario* s) {
  return s ? static_cast<size_t>(s->path.grid.n_points()) : 0;
}

mfgm_status mfgm_scenario_column(const mfgm_scenario* s, const char* name, double* out,
                                 size_t capacity) {
  if (!s || !name || !out) return Null("scenario, name and out");
  const mfgmajor::ScenarioPath& p = s->path;
  const std::string n = name;
  if (n == "t") return CopyColumn(p.grid.times(), name, out, capacity);
  if (n == "S") return CopyColumn(p.S, name, out, capacity);
  if (n == "Xbar") return CopyColumn(p.Xbar, name, out, capacity);
  if (n == "X0") return CopyColumn(p.X0, name, out, capacity);
  for (int i = 0; i < p.n_minor(); ++i) {
    if (n == "Xcheck_" + std::to_string(i + 1)) return CopyColumn(p.Xcheck[i], name, out, capacity);
  }
  return Fail(MFGM_ERR_INVALID_ARGUMENT, "unknown scenario column '" + n + "'");
}

size_t mfgm_solution_length(const mfgm_solution* s) { return s ? s->table.rows.size() : 0; }

mfgm_status mfgm_solution_column(const mfgm_solution* s, const char* name, double* out,
                                 size_t capacity) {
  if (!s || !name || !out) return Null("solution, name and out");
  const auto& h = s->table.header;
  if (std::find(h.begin(), h.end(), name) == h.end()) {
    return Fail(MFGM_ERR_INVALID_ARGUMENT, "unknown solution column '" + std::string(name) + "'");
  }
  std::vector<double> v;
  const mfgm_status st = Guard([&] { v = s->table.ColumnValues(name); });
  if (st != MFGM_OK) return st;
  return CopyColumn(v, name, out, capacity);
}

double mfgm_epanechnikov(double x) { return mfgmajor::Epanechnikov(x); }

mfgm_status mfgm_kernel_volatility(const double* times, const double* price, size_t n,
                                   const double* at, size_t m, double bandwidth, double* out) {
  if (!times || !price || (m > 0 && (!at || !out))) return Null("input and output arrays");
  return Guard([&] {
    const auto v = mfgmajor::KernelVolatility(std::vector<double>(times, times + n),
                                              std::vector<double>(price, price + n),
                                              std::vector<double>(at, at + m), bandwidth);
    std::copy(v.begin(), v.end(), out);
  });
}

mfgm_status mfgm_forecast_volatility(const double* increments, size_t n, double dt,
                                     double* out) {
  if (!increments || !out) return Null("increments and out");
  return Guard([&] {
    *out = mfgmajor::ForecastVolatility({dt, std::vector<double>(increments, increments + n)});
  });
}

mfgm_status mfgm_realized_volatility(const double* increments, size_t n, double dt,
                                     double* out) {
  if (!increments || !out) return Null("increments and out");
  return Guard([&] {
    *out = mfgmajor::RealizedVolatility({dt, std::vector<double>(increments, increments + n)});
  });
}

mfgm_status mfgm_sample_correlation(const double* x, const double* y, size_t n, double* rho,
                                    double* ci_lo, double* ci_hi) {
  if ((n > 0 && (!x || !y)) || !rho) return Null("x, y and rho");
  return Guard([&] {
    const auto c = mfgmajor::SampleCorrelation(0.0, std::vector<double>(x, x + n),
                                               std::vector<double>(y, y + n));
    *rho = c.rho;
    if (ci_lo) *ci_lo = c.ci_lo;
    if (ci_hi) *ci_hi = c.ci_hi;
  });
}

}  // extern "C"
