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

#include "hsaudit/hsaudit.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "hsaudit/accountant.h"
#include "hsaudit/adversarial_loss.h"
#include "hsaudit/audit.h"
#include "hsaudit/hyperparams.h"
#include "hsaudit/mechanism.h"
#include "hsaudit/report_io.h"
#include "hsaudit/tradeoff.h"

struct hsa_profile {
  hsaudit::PrivacyProfile profile;
};

struct hsa_curve {
  hsaudit::TradeoffCurve curve;
};

struct hsa_audit_report {
  hsaudit::AuditReport report;
};

namespace {

thread_local std::string last_error;

hsa_status ToCode(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kOk:
      return HSA_OK;
    case absl::StatusCode::kInvalidArgument:
      return HSA_INVALID_ARGUMENT;
    case absl::StatusCode::kOutOfRange:
      return HSA_OUT_OF_RANGE;
    case absl::StatusCode::kFailedPrecondition:
      return HSA_FAILED_PRECONDITION;
    case absl::StatusCode::kNotFound:
      return HSA_NOT_FOUND;
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
      return HSA_IO_ERROR;
    default:
      return HSA_INTERNAL;
  }
}

hsa_status Fail(hsa_status code, std::string message) {
  last_error = std::move(message);
  return code;
}

hsa_status Report(const absl::Status& status) {
  if (status.ok()) {
    last_error.clear();
    return HSA_OK;
  }
  return Fail(ToCode(status.code()), std::string(status.message()));
}

// Runs `body`, translating exceptions so none cross the C boundary.
template <typename F>
hsa_status Guard(F&& body) {
  try {
    return Report(body());
  } catch (const std::bad_alloc&) {
    return Fail(HSA_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(HSA_INTERNAL, e.what());
  }
}

hsa_status NullArgument(const char* name) {
  return Fail(HSA_INVALID_ARGUMENT, absl::StrCat(name, " must not be null"));
}

hsaudit::HyperParams FromC(const hsa_hyperparams& hp) {
  hsaudit::HyperParams out;
  out.learning_rate = hp.learning_rate;
  out.clip_norm = hp.clip_norm;
  out.noise_multiplier = hp.noise_multiplier;
  out.sampling_rate = hp.sampling_rate;
  out.steps = hp.steps;
  out.expected_batch = hp.expected_batch;
  return out;
}

hsaudit::AccountantOptions FromC(const hsa_accountant_options* options) {
  hsaudit::AccountantOptions out;
  if (options != nullptr) {
    out.grid_spacing = options->grid_spacing;
    out.truncation_mass = options->truncation_mass;
  }
  return out;
}

absl::Status SetScalar(const absl::StatusOr<double>& value, double* out) {
  if (!value.ok()) return value.status();
  *out = *value;
  return absl::OkStatus();
}

}  // namespace

extern "C" {

const char* hsa_version(void) { return "0.1.0"; }

const char* hsa_last_error(void) { return last_error.c_str(); }

void hsa_hyperparams_init(hsa_hyperparams* hp) {
  if (hp == nullptr) return;
  *hp = {1.0, 1.0, 1.0, 1.0, 1, 1.0};
}

hsa_status hsa_step_log_lr(double v, double sampling_rate,
                           double noise_multiplier, double* out) {
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    return SetScalar(hsaudit::StepLogLr(v, sampling_rate, noise_multiplier),
                     out);
  });
}

hsa_status hsa_encoding_base(double noise_multiplier, double* out) {
  if (out == nullptr) return NullArgument("out");
  return Guard([&]() -> absl::Status {
    absl::StatusOr<hsaudit::EncodingScheme> scheme =
        hsaudit::ChooseScheme(noise_multiplier);
    if (!scheme.ok()) return scheme.status();
    *out = scheme->base();
    return absl::OkStatus();
  });
}

hsa_status hsa_adversarial_gradient(const hsa_hyperparams* hp, double x,
                                    double theta, double* out) {
  if (hp == nullptr) return NullArgument("hp");
  if (out == nullptr) return NullArgument("out");
  return Guard([&]() -> absl::Status {
    absl::StatusOr<hsaudit::AdversarialLoss> loss =
        hsaudit::AdversarialLoss::ForHyperParams(FromC(*hp));
    if (!loss.ok()) return loss.status();
    return SetScalar(loss->Gradient(x, theta), out);
  });
}

hsa_status hsa_extract_llr_sum(const hsa_hyperparams* hp,
                               double final_iterate, double* out) {
  if (hp == nullptr) return NullArgument("hp");
  if (out == nullptr) return NullArgument("out");
  return Guard([&]() -> absl::Status {
    absl::StatusOr<hsaudit::AdversarialLoss> loss =
        hsaudit::AdversarialLoss::ForHyperParams(FromC(*hp));
    if (!loss.ok()) return loss.status();
    return SetScalar(loss->ExtractLlrSum(final_iterate), out);
  });
}

hsa_status hsa_simulate(const hsa_hyperparams* hp, int64_t num_zeros,
                        int with_target, uint64_t seed, int explicit_records,
                        double* final_iterate, double* trajectory) {
  if (hp == nullptr) return NullArgument("hp");
  if (final_iterate == nullptr) return NullArgument("final_iterate");
  return Guard([&]() -> absl::Status {
    const hsaudit::HyperParams params = FromC(*hp);
    if (num_zeros < 0) {
      return absl::InvalidArgumentError("num_zeros must be nonnegative");
    }
    absl::StatusOr<hsaudit::AdversarialLoss> loss =
        hsaudit::AdversarialLoss::ForHyperParams(params);
    if (!loss.ok()) return loss.status();
    const hsaudit::WorstCaseDataset dataset{num_zeros, with_target != 0};
    hsaudit::SimulationOptions options;
    options.keep_trajectory = trajectory != nullptr;

    absl::StatusOr<hsaudit::DpsgdResult> result;
    if (explicit_records != 0) {
      const std::vector<double> records = dataset.Materialize();
      const hsaudit::AdversarialLoss& bound = *loss;
      result = hsaudit::RunDpsgdExplicit(
          records,
          [&bound](double x, double theta) { return bound.Gradient(x, theta); },
          params, seed, options);
    } else {
      result = hsaudit::RunDpsgdStructured(dataset, *loss, params, seed,
                                           options);
    }
    if (!result.ok()) return result.status();
    *final_iterate = result->final_iterate;
    if (trajectory != nullptr) {
      const std::vector<double>& iterates = result->trajectory->iterates;
      std::memcpy(trajectory, iterates.data(),
                  iterates.size() * sizeof(double));
    }
    return absl::OkStatus();
  });
}

void hsa_accountant_options_init(hsa_accountant_options* options) {
  if (options == nullptr) return;
  const hsaudit::AccountantOptions defaults;
  options->grid_spacing = defaults.grid_spacing;
  options->truncation_mass = defaults.truncation_mass;
}

hsa_status hsa_calibrate_sigma(double epsilon, double delta,
                               double sampling_rate, int64_t steps,
                               const hsa_accountant_options* options,
                               double* sigma) {
  if (sigma == nullptr) return NullArgument("sigma");
  return Guard([&] {
    return SetScalar(hsaudit::CalibrateSigma(epsilon, delta, sampling_rate,
                                             steps, FromC(options)),
                     sigma);
  });
}

hsa_status hsa_profile_create(double noise_multiplier, double sampling_rate,
                              int64_t steps,
                              const hsa_accountant_options* options,
                              hsa_profile** out) {
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&]() -> absl::Status {
    absl::StatusOr<hsaudit::PrivacyProfile> profile = hsaudit::DpsgdProfile(
        noise_multiplier, sampling_rate, steps, FromC(options));
    if (!profile.ok()) return profile.status();
    *out = new hsa_profile{*std::move(profile)};
    return absl::OkStatus();
  });
}

void hsa_profile_free(hsa_profile* profile) { delete profile; }

hsa_status hsa_profile_delta(const hsa_profile* profile, double epsilon,
                             double* delta) {
  if (profile == nullptr) return NullArgument("profile");
  if (delta == nullptr) return NullArgument("delta");
  return Guard([&] {
    *delta = profile->profile.WorstDelta(epsilon);
    return absl::OkStatus();
  });
}

hsa_status hsa_profile_write_csv(const hsa_profile* profile, double lo,
                                 double hi, double step, const char* path) {
  if (profile == nullptr) return NullArgument("profile");
  if (path == nullptr) return NullArgument("path");
  return Guard([&]() -> absl::Status {
    if (!(step > 0.0) || !(lo <= hi) || !std::isfinite(lo) ||
        !std::isfinite(hi)) {
      return absl::InvalidArgumentError(
          "epsilon range needs finite lo <= hi and step > 0");
    }
    std::vector<std::pair<double, double>> rows;
    const auto count = static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (int64_t i = 0; i <= count; ++i) {
      const double epsilon = lo + static_cast<double>(i) * step;
      rows.emplace_back(epsilon, profile->profile.WorstDelta(epsilon));
    }
    return hsaudit::WriteTextFile(path, hsaudit::ProfileToCsv(rows));
  });
}

hsa_status hsa_curve_from_profile(const hsa_profile* profile,
                                  hsa_curve** out) {
  if (profile == nullptr) return NullArgument("profile");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    *out = new hsa_curve{hsaudit::TradeoffFromProfile(profile->profile)};
    return absl::OkStatus();
  });
}

hsa_status hsa_curve_mog(double noise_multiplier, double sampling_rate,
                         int64_t steps, hsa_curve** out) {
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&]() -> absl::Status {
    absl::StatusOr<hsaudit::TradeoffCurve> curve =
        hsaudit::MogTradeoff(noise_multiplier, sampling_rate, steps);
    if (!curve.ok()) return curve.status();
    *out = new hsa_curve{*std::move(curve)};
    return absl::OkStatus();
  });
}

void hsa_curve_free(hsa_curve* curve) { delete curve; }

hsa_status hsa_curve_eval(const hsa_curve* curve, double alpha,
                          double* beta) {
  if (curve == nullptr) return NullArgument("curve");
  if (beta == nullptr) return NullArgument("beta");
  return Guard([&]() -> absl::Status {
    if (std::isnan(alpha)) return absl::InvalidArgumentError("alpha is NaN");
    *beta = curve->curve(alpha);
    return absl::OkStatus();
  });
}

hsa_status hsa_curve_write_csv(const hsa_curve* curve, size_t points,
                               const char* path) {
  if (curve == nullptr) return NullArgument("curve");
  if (path == nullptr) return NullArgument("path");
  return Guard([&]() -> absl::Status {
    if (points < 2) return absl::InvalidArgumentError("points must be >= 2");
    const std::vector<hsaudit::CurvePoint> samples =
        curve->curve.Sample(hsaudit::PlotAlphaGrid(points));
    return hsaudit::WriteTextFile(path, hsaudit::CurveToCsv(samples));
  });
}

void hsa_audit_config_init(hsa_audit_config* config) {
  if (config == nullptr) return;
  const hsaudit::AuditConfig defaults;
  hsa_hyperparams_init(&config->hp);
  config->num_zeros = defaults.num_zeros;
  config->trials_per_world = defaults.trials_per_world;
  config->master_seed = defaults.master_seed;
  config->runs = defaults.runs;
  config->delta = defaults.delta;
  config->workers = defaults.workers;
  hsa_accountant_options_init(&config->accountant);
  config->epsilon_grid = nullptr;
  config->epsilon_grid_size = 0;
  config->target_epsilon = std::numeric_limits<double>::quiet_NaN();
}

hsa_status hsa_audit_run(const hsa_audit_config* config,
                         hsa_audit_report** out) {
  if (config == nullptr) return NullArgument("config");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&]() -> absl::Status {
    hsaudit::AuditConfig cfg;
    cfg.hp = FromC(config->hp);
    cfg.num_zeros = config->num_zeros;
    cfg.trials_per_world = config->trials_per_world;
    cfg.master_seed = config->master_seed;
    cfg.runs = config->runs;
    cfg.delta = config->delta;
    cfg.workers = config->workers;
    cfg.accountant = FromC(&config->accountant);
    if (config->epsilon_grid != nullptr) {
      cfg.epsilon_grid.assign(
          config->epsilon_grid,
          config->epsilon_grid + config->epsilon_grid_size);
    }
    if (std::isfinite(config->target_epsilon)) {
      cfg.target_epsilon = config->target_epsilon;
    }
    absl::StatusOr<hsaudit::AuditReport> report = hsaudit::RunAudit(cfg);
    if (!report.ok()) return report.status();
    *out = new hsa_audit_report{*std::move(report)};
    return absl::OkStatus();
  });
}

void hsa_audit_report_free(hsa_audit_report* report) { delete report; }

size_t hsa_audit_report_num_runs(const hsa_audit_report* report) {
  return report == nullptr ? 0 : report->report.per_run.size();
}

hsa_status hsa_audit_report_run(const hsa_audit_report* report, size_t run,
                                double* epsilon, int* exceeds_grid) {
  if (report == nullptr) return NullArgument("report");
  if (epsilon == nullptr) return NullArgument("epsilon");
  if (run >= report->report.per_run.size()) {
    return Fail(HSA_OUT_OF_RANGE, absl::StrCat("no run ", run));
  }
  const hsaudit::EpsilonEstimate& estimate = report->report.per_run[run];
  *epsilon = estimate.value;
  if (exceeds_grid != nullptr) *exceeds_grid = estimate.exceeds_grid ? 1 : 0;
  last_error.clear();
  return HSA_OK;
}

double hsa_audit_report_mean(const hsa_audit_report* report) {
  return report == nullptr ? std::numeric_limits<double>::quiet_NaN()
                           : report->report.mean;
}

double hsa_audit_report_std_dev(const hsa_audit_report* report) {
  return report == nullptr ? std::numeric_limits<double>::quiet_NaN()
                           : report->report.std_dev;
}

size_t hsa_audit_report_num_warnings(const hsa_audit_report* report) {
  return report == nullptr ? 0 : report->report.warnings.size();
}

const char* hsa_audit_report_warning(const hsa_audit_report* report,
                                     size_t index) {
  if (report == nullptr || index >= report->report.warnings.size()) {
    return nullptr;
  }
  return report->report.warnings[index].c_str();
}

hsa_status hsa_audit_report_json(const hsa_audit_report* report,
                                 char** out) {
  if (report == nullptr) return NullArgument("report");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&]() -> absl::Status {
    const std::string json = hsaudit::ReportToJson(report->report);
    char* buffer = static_cast<char*>(std::malloc(json.size() + 1));
    if (buffer == nullptr) throw std::bad_alloc();
    std::memcpy(buffer, json.c_str(), json.size() + 1);
    *out = buffer;
    return absl::OkStatus();
  });
}

hsa_status hsa_audit_report_write(const hsa_audit_report* report,
                                  const char* directory) {
  if (report == nullptr) return NullArgument("report");
  if (directory == nullptr) return NullArgument("directory");
  return Guard([&] {
    return hsaudit::WriteAuditArtifacts(report->report, directory);
  });
}

void hsa_string_free(char* str) { std::free(str); }

}  // extern "C"
