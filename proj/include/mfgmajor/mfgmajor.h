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

/* C interface of the mfgmajor library. All functions return an mfgm_status
 * unless stated otherwise; on failure mfgm_last_error() describes the error
 * of the calling thread. Strings returned by accessors stay valid until the
 * owning handle is destroyed. */

#ifndef MFGMAJOR_MFGMAJOR_H_
#define MFGMAJOR_MFGMAJOR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MFGM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define MFGM_API __attribute__((visibility("default")))
#else
#define MFGM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfgm_status {
  MFGM_OK = 0,
  MFGM_ERR_INVALID_ARGUMENT = 1, /* null handle, unknown name, bad size */
  MFGM_ERR_DOMAIN = 2,           /* input outside the model's domain */
  MFGM_ERR_SINGULAR = 3,         /* numerically singular system */
  MFGM_ERR_CONFIG = 4,           /* invalid configuration entry */
  MFGM_ERR_IO = 5,               /* file could not be read or written */
  MFGM_ERR_BUFFER_TOO_SMALL = 6, /* output buffer shorter than required */
  MFGM_ERR_INTERNAL = 7
} mfgm_status;

typedef struct mfgm_config mfgm_config;
typedef struct mfgm_diagnostics mfgm_diagnostics;
typedef struct mfgm_result mfgm_result;
typedef struct mfgm_scenario mfgm_scenario;
typedef struct mfgm_solution mfgm_solution;

MFGM_API const char* mfgm_version(void);
MFGM_API const char* mfgm_status_string(mfgm_status status);
/* Message of the last failure on this thread, "" if none. */
MFGM_API const char* mfgm_last_error(void);
/* Configuration key of the last MFGM_ERR_CONFIG failure, "" otherwise. */
MFGM_API const char* mfgm_last_error_key(void);

/* Configuration: "section.name" keys layered over the built-in defaults. */
MFGM_API mfgm_status mfgm_config_create(mfgm_config** out);
MFGM_API void mfgm_config_destroy(mfgm_config* config);
MFGM_API mfgm_status mfgm_config_load_file(mfgm_config* config, const char* path);
MFGM_API mfgm_status mfgm_config_load_string(mfgm_config* config, const char* text);
MFGM_API mfgm_status mfgm_config_set(mfgm_config* config, const char* key, const char* value);
/* Resolved value of a key. `needed` (optional) receives the length plus the
 * terminating zero; MFGM_ERR_BUFFER_TOO_SMALL if it exceeds `capacity`. */
MFGM_API mfgm_status mfgm_config_get(const mfgm_config* config, const char* key, char* buffer,
                                     size_t capacity, size_t* needed);
MFGM_API size_t mfgm_config_key_count(void);
/* Key i in canonical order, NULL when out of range. */
MFGM_API const char* mfgm_config_key(size_t i);

MFGM_API mfgm_status mfgm_config_validate(const mfgm_config* config, mfgm_diagnostics** out);
MFGM_API size_t mfgm_diagnostics_count(const mfgm_diagnostics* diagnostics);
MFGM_API size_t mfgm_diagnostics_error_count(const mfgm_diagnostics* diagnostics);
/* 1 for an error, 0 for a warning. */
MFGM_API int mfgm_diagnostics_is_error(const mfgm_diagnostics* diagnostics, size_t i);
MFGM_API const char* mfgm_diagnostics_key(const mfgm_diagnostics* diagnostics, size_t i);
MFGM_API const char* mfgm_diagnostics_message(const mfgm_diagnostics* diagnostics, size_t i);
MFGM_API void mfgm_diagnostics_destroy(mfgm_diagnostics* diagnostics);

/* Runs experiment.kind, or one task: simulate, equilibrium, homogeneous,
 * epsnash, estimate or oracle. */
MFGM_API mfgm_status mfgm_run(const mfgm_config* config, mfgm_result** out);
MFGM_API mfgm_status mfgm_run_task(const mfgm_config* config, const char* task,
                                   mfgm_result** out);
MFGM_API const char* mfgm_result_output_dir(const mfgm_result* result);
MFGM_API size_t mfgm_result_file_count(const mfgm_result* result);
MFGM_API const char* mfgm_result_file(const mfgm_result* result, size_t i);
MFGM_API size_t mfgm_result_summary_count(const mfgm_result* result);
MFGM_API const char* mfgm_result_summary(const mfgm_result* result, size_t i);
MFGM_API size_t mfgm_result_warning_count(const mfgm_result* result);
MFGM_API const char* mfgm_result_warning(const mfgm_result* result, size_t i);
MFGM_API void mfgm_result_destroy(mfgm_result* result);

/* Scenarios use the market parameters, grid and n_minor of the config. */
MFGM_API mfgm_status mfgm_scenario_simulate(const mfgm_config* config, uint64_t seed,
                                            mfgm_scenario** out);
MFGM_API mfgm_status mfgm_scenario_read_csv(const char* path, mfgm_scenario** out);
MFGM_API mfgm_status mfgm_scenario_write_csv(const mfgm_scenario* scenario, const char* path);
MFGM_API void mfgm_scenario_destroy(mfgm_scenario* scenario);

/* Equilibria on a scenario. The Stackelberg solution includes phi_i for the
 * first minor agent when the scenario has one. */
MFGM_API mfgm_status mfgm_equilibrium_solve(const mfgm_config* config,
                                            const mfgm_scenario* scenario,
                                            mfgm_solution** out);
MFGM_API mfgm_status mfgm_homogeneous_solve(const mfgm_config* config,
                                            const mfgm_scenario* scenario,
                                            mfgm_solution** out);
MFGM_API void mfgm_solution_destroy(mfgm_solution* solution);

/* Named columns, as in the CSV outputs: t,S,Xbar,X0,Xcheck_1.. for
 * scenarios; t,phi0,N,phibar,price,M0,M,Ybar,phi_i for the Stackelberg
 * solution; t,phi_star,phi_bar,price,I,I_tilde for the homogeneous one. */
MFGM_API size_t mfgm_scenario_length(const mfgm_scenario* scenario);
MFGM_API mfgm_status mfgm_scenario_column(const mfgm_scenario* scenario, const char* name,
                                          double* out, size_t capacity);
MFGM_API size_t mfgm_solution_length(const mfgm_solution* solution);
MFGM_API mfgm_status mfgm_solution_column(const mfgm_solution* solution, const char* name,
                                          double* out, size_t capacity);

/* Estimators. */
MFGM_API double mfgm_epanechnikov(double x);
/* Kernel volatility of `price` (n points at `times`) at m evaluation times;
 * NaN where the window is empty. */
MFGM_API mfgm_status mfgm_kernel_volatility(const double* times, const double* price, size_t n,
                                            const double* at, size_t m, double bandwidth,
                                            double* out);
/* From n increments with spacing dt. */
MFGM_API mfgm_status mfgm_forecast_volatility(const double* increments, size_t n, double dt,
                                              double* out);
MFGM_API mfgm_status mfgm_realized_volatility(const double* increments, size_t n, double dt,
                                              double* out);
/* Sample correlation with a 95% Fisher-z interval; NaN when undefined. */
MFGM_API mfgm_status mfgm_sample_correlation(const double* x, const double* y, size_t n,
                                             double* rho, double* ci_lo, double* ci_hi);

#ifdef __cplusplus
}
#endif

#endif /* MFGMAJOR_MFGMAJOR_H_ */
