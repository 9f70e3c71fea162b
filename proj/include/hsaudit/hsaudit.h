//
// Copyright 2026 The hsaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// C interface to the hidden-state DP-SGD auditing library.
//
// Every function returning hsa_status leaves a message for the calling
// thread in hsa_last_error() on failure. Objects are opaque and released with
// their matching *_free function; passing NULL to a free function is a no-op.

#ifndef HSAUDIT_HSAUDIT_H_
#define HSAUDIT_HSAUDIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HSAUDIT_BUILDING_LIBRARY)
#define HSAUDIT_API __declspec(dllexport)
#else
#define HSAUDIT_API __declspec(dllimport)
#endif
#else
#define HSAUDIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hsa_status {
  HSA_OK = 0,
  HSA_INVALID_ARGUMENT = 1,
  HSA_OUT_OF_RANGE = 2,
  HSA_FAILED_PRECONDITION = 3,
  HSA_NOT_FOUND = 4,
  HSA_IO_ERROR = 5,
  HSA_INTERNAL = 6,
} hsa_status;

HSAUDIT_API const char* hsa_version(void);

// Message of the last failed call on this thread, or "" if none.
HSAUDIT_API const char* hsa_last_error(void);

typedef struct hsa_hyperparams {
  double learning_rate;
  double clip_norm;
  double noise_multiplier;
  double sampling_rate;
  int64_t steps;
  // q * |D| for the smaller neighbour.
  double expected_batch;
} hsa_hyperparams;

// All fields 1.
HSAUDIT_API void hsa_hyperparams_init(hsa_hyperparams* hp);

/* Adversarial loss. */

HSAUDIT_API hsa_status hsa_step_log_lr(double v, double sampling_rate,
                                       double noise_multiplier, double* out);

// Encoding base chosen for a noise multiplier.
HSAUDIT_API hsa_status hsa_encoding_base(double noise_multiplier,
                                         double* out);

HSAUDIT_API hsa_status hsa_adversarial_gradient(const hsa_hyperparams* hp,
                                                double x, double theta,
                                                double* out);

HSAUDIT_API hsa_status hsa_extract_llr_sum(const hsa_hyperparams* hp,
                                           double final_iterate, double* out);

/* Simulation. */

// Runs DP-SGD with the adversarial loss on {0 x num_zeros} or, if
// with_target is nonzero, on {0 x num_zeros, 1}. hp->expected_batch is used
// as given. With explicit_records nonzero every record is visited, which is
// only practical for small datasets.
//
// `trajectory` may be NULL; otherwise it must hold hp->steps + 1 values.
HSAUDIT_API hsa_status hsa_simulate(const hsa_hyperparams* hp,
                                    int64_t num_zeros, int with_target,
                                    uint64_t seed, int explicit_records,
                                    double* final_iterate,
                                    double* trajectory);

/* Accounting. */

typedef struct hsa_accountant_options {
  double grid_spacing;
  double truncation_mass;
} hsa_accountant_options;

// grid_spacing 1e-4, truncation_mass 1e-12.
HSAUDIT_API void hsa_accountant_options_init(hsa_accountant_options* options);

// `options` may be NULL for the defaults in all functions below.
HSAUDIT_API hsa_status hsa_calibrate_sigma(
    double epsilon, double delta, double sampling_rate, int64_t steps,
    const hsa_accountant_options* options, double* sigma);

typedef struct hsa_profile hsa_profile;

HSAUDIT_API hsa_status hsa_profile_create(
    double noise_multiplier, double sampling_rate, int64_t steps,
    const hsa_accountant_options* options, hsa_profile** out);
HSAUDIT_API void hsa_profile_free(hsa_profile* profile);

// Worst-direction delta.
HSAUDIT_API hsa_status hsa_profile_delta(const hsa_profile* profile,
                                         double epsilon, double* delta);

// "epsilon,delta" rows for epsilon = lo, lo + step, ..., <= hi.
HSAUDIT_API hsa_status hsa_profile_write_csv(const hsa_profile* profile,
                                             double lo, double hi,
                                             double step, const char* path);

typedef struct hsa_curve hsa_curve;

HSAUDIT_API hsa_status hsa_curve_from_profile(const hsa_profile* profile,
                                              hsa_curve** out);
// Final-iterate curve of DP-SGD with a linear loss.
HSAUDIT_API hsa_status hsa_curve_mog(double noise_multiplier,
                                     double sampling_rate, int64_t steps,
                                     hsa_curve** out);
HSAUDIT_API void hsa_curve_free(hsa_curve* curve);

HSAUDIT_API hsa_status hsa_curve_eval(const hsa_curve* curve, double alpha,
                                      double* beta);

// "alpha,beta" rows on the default plotting grid of `points` values.
HSAUDIT_API hsa_status hsa_curve_write_csv(const hsa_curve* curve,
                                           size_t points, const char* path);

/* Auditing. */

typedef struct hsa_audit_config {
  // expected_batch is ignored and derived as sampling_rate * num_zeros.
  hsa_hyperparams hp;
  int64_t num_zeros;
  int64_t trials_per_world;
  uint64_t master_seed;
  int runs;
  double delta;
  // 0 selects the number of hardware threads.
  int workers;
  hsa_accountant_options accountant;
  // NULL selects 0.5, 0.6, ..., 20.0.
  const double* epsilon_grid;
  size_t epsilon_grid_size;
  // Echoed in the report when finite.
  double target_epsilon;
} hsa_audit_config;

HSAUDIT_API void hsa_audit_config_init(hsa_audit_config* config);

typedef struct hsa_audit_report hsa_audit_report;

HSAUDIT_API hsa_status hsa_audit_run(const hsa_audit_config* config,
                                     hsa_audit_report** out);
HSAUDIT_API void hsa_audit_report_free(hsa_audit_report* report);

HSAUDIT_API size_t hsa_audit_report_num_runs(const hsa_audit_report* report);
// `exceeds_grid` may be NULL.
HSAUDIT_API hsa_status hsa_audit_report_run(const hsa_audit_report* report,
                                            size_t run, double* epsilon,
                                            int* exceeds_grid);
// NaN when every run exceeded the grid.
HSAUDIT_API double hsa_audit_report_mean(const hsa_audit_report* report);
HSAUDIT_API double hsa_audit_report_std_dev(const hsa_audit_report* report);

HSAUDIT_API size_t
hsa_audit_report_num_warnings(const hsa_audit_report* report);
HSAUDIT_API const char* hsa_audit_report_warning(
    const hsa_audit_report* report, size_t index);

// Report JSON; release with hsa_string_free.
HSAUDIT_API hsa_status hsa_audit_report_json(const hsa_audit_report* report,
                                             char** out);

// report.json, observed_roc.csv, pld_curve.csv and mog_curve.csv.
HSAUDIT_API hsa_status hsa_audit_report_write(const hsa_audit_report* report,
                                              const char* directory);

HSAUDIT_API void hsa_string_free(char* str);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // HSAUDIT_HSAUDIT_H_
