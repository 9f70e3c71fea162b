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

#include "hsaudit/accountant.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace hsaudit {

absl::StatusOr<ComposedPlds> ComposeDpsgd(double noise_multiplier,
                                          double sampling_rate, int64_t steps,
                                          const AccountantOptions& options) {
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("steps must be >= 1, got ", steps, "."));
  }
  auto composed = [&](AdjacencyDirection direction)
      -> absl::StatusOr<PrivacyLossDistribution> {
    absl::StatusOr<PrivacyLossDistribution> one_step =
        PrivacyLossDistribution::SubsampledGaussian(
            sampling_rate, noise_multiplier, options.grid_spacing, direction,
            options.truncation_mass);
    if (!one_step.ok()) return one_step.status();
    return one_step->SelfCompose(steps, options.composition);
  };
  absl::StatusOr<PrivacyLossDistribution> add =
      composed(AdjacencyDirection::kAdd);
  if (!add.ok()) return add.status();
  absl::StatusOr<PrivacyLossDistribution> remove =
      composed(AdjacencyDirection::kRemove);
  if (!remove.ok()) return remove.status();
  return ComposedPlds{*std::move(add), *std::move(remove)};
}

absl::StatusOr<PrivacyProfile> DpsgdProfile(double noise_multiplier,
                                            double sampling_rate,
                                            int64_t steps,
                                            const AccountantOptions& options) {
  absl::StatusOr<ComposedPlds> plds =
      ComposeDpsgd(noise_multiplier, sampling_rate, steps, options);
  if (!plds.ok()) return plds.status();
  return PrivacyProfile::FromPlds(plds->add, plds->remove);
}

absl::StatusOr<double> DpsgdDelta(double epsilon, double noise_multiplier,
                                  double sampling_rate, int64_t steps,
                                  const AccountantOptions& options) {
  absl::StatusOr<ComposedPlds> plds =
      ComposeDpsgd(noise_multiplier, sampling_rate, steps, options);
  if (!plds.ok()) return plds.status();
  return std::max(plds->add.DeltaForEpsilon(epsilon),
                  plds->remove.DeltaForEpsilon(epsilon));
}

namespace {

// Grid spacing at or below which calibration first runs on a grid ten times
// coarser and uses the result as a warm start.
constexpr double kCoarseStartSpacing = 1e-4;

// Calibration result with the local slope of log delta against log sigma.
struct Calibrated {
  double sigma;
  double log_slope;
  ComposedPlds plds;
};

// Calibration proper, starting the bracket search at `sigma`. Cold starts
// (log_slope == 0) step by factors of 2. Warm starts size the first step
// from `log_slope` and double it in log space each time.
absl::StatusOr<Calibrated> CalibrateFrom(double epsilon, double delta,
                                         double sampling_rate, int64_t steps,
                                         const AccountantOptions& options,
                                         double sigma, double log_slope) {
  const double lower_target = delta * (1.0 - kCalibrationRelativeTolerance);
  const double log_goal =
      std::log(delta * (1.0 - 0.5 * kCalibrationRelativeTolerance));
  // The last two evaluations, for the slope estimate handed back.
  double prev_sigma = 0.0, prev_delta = 0.0;
  double last_sigma = 0.0, last_delta = 0.0;
  std::optional<ComposedPlds> last_plds;
  auto evaluate = [&](double s) -> absl::StatusOr<double> {
    absl::StatusOr<ComposedPlds> plds =
        ComposeDpsgd(s, sampling_rate, steps, options);
    if (!plds.ok()) return plds.status();
    const double d = std::max(plds->add.DeltaForEpsilon(epsilon),
                              plds->remove.DeltaForEpsilon(epsilon));
    prev_sigma = last_sigma;
    prev_delta = last_delta;
    last_sigma = s;
    last_delta = d;
    last_plds.emplace(*std::move(plds));
    return d;
  };
  auto in_window = [&](double d) { return d >= lower_target && d <= delta; };
  auto accept = [&]() -> Calibrated {
    double slope = log_slope;
    if (prev_delta > 0.0 && last_delta > 0.0 && prev_sigma != last_sigma) {
      slope = (std::log(last_delta) - std::log(prev_delta)) /
              (std::log(last_sigma) - std::log(prev_sigma));
    }
    return Calibrated{last_sigma, slope, *std::move(last_plds)};
  };
  auto bracket_error = [&]() {
    return absl::NotFoundError(absl::StrCat(
        "no noise multiplier in [", kMinCalibratedSigma, ", ",
        kMaxCalibratedSigma, "] gives delta ", delta, " at epsilon ", epsilon,
        "."));
  };

  // Bracket: delta(lo) > target >= delta(hi).
  double lo = 0.0, hi = 0.0, delta_lo = 0.0, delta_hi = 0.0;
  std::optional<ComposedPlds> hi_plds;
  absl::StatusOr<double> d = evaluate(sigma);
  if (!d.ok()) return d.status();
  if (in_window(*d)) return accept();
  const bool warm = log_slope < 0.0 && *d > 0.0;
  double log_step =
      warm ? std::clamp(std::abs((log_goal - std::log(*d)) / log_slope),
                        1e-5, std::log(1.02))
           : std::log(2.0);
  // Warm steps after a miss on the same side follow the secant through the
  // last two evaluations, overshooting by 10%, and at most double.
  int misses = 0;
  auto next_step = [&]() {
    if (warm && misses > 0) {
      const double secant = (std::log(last_delta) - std::log(prev_delta)) /
                            (std::log(last_sigma) - std::log(prev_sigma));
      const double estimate =
          1.1 * std::abs((log_goal - std::log(last_delta)) / secant);
      log_step = secant < 0.0 && std::isfinite(estimate) && misses < 4
                     ? std::clamp(estimate, 1e-5, 2.0 * log_step)
                     : 2.0 * log_step;
    }
    ++misses;
    return std::exp(warm ? log_step : std::log(2.0));
  };
  if (*d > delta) {
    lo = sigma;
    delta_lo = *d;
    while (true) {
      sigma = std::min(sigma * next_step(), kMaxCalibratedSigma);
      d = evaluate(sigma);
      if (!d.ok()) return d.status();
      if (in_window(*d)) return accept();
      if (*d <= delta) break;
      if (sigma >= kMaxCalibratedSigma) return bracket_error();
      lo = sigma;
      delta_lo = *d;
    }
    hi = sigma;
    delta_hi = *d;
  } else {
    hi = sigma;
    delta_hi = *d;
    while (true) {
      hi_plds = std::move(last_plds);
      sigma = std::max(sigma / next_step(), kMinCalibratedSigma);
      d = evaluate(sigma);
      if (!d.ok()) return d.status();
      if (in_window(*d)) return accept();
      if (*d > delta) break;
      if (sigma <= kMinCalibratedSigma) return bracket_error();
      hi = sigma;
      delta_hi = *d;
    }
    lo = sigma;
    delta_lo = *d;
  }
  if (hi == last_sigma) hi_plds = std::move(last_plds);

  // Safeguarded false position on (log sigma, log delta), aiming at the
  // middle of the window; falls back to geometric bisection whenever the
  // interpolant is unusable or the bracket stops shrinking fast enough.
  int stalled = 0;
  for (int iteration = 0; iteration < 200; ++iteration) {
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    double candidate = 0.5 * (log_lo + log_hi);
    if (stalled < 2 && delta_hi > 0.0) {
      const double f_lo = std::log(delta_lo);
      const double f_hi = std::log(delta_hi);
      const double t = (f_lo - log_goal) / (f_lo - f_hi);
      const double interpolated = log_lo + t * (log_hi - log_lo);
      const double margin = 1e-3 * (log_hi - log_lo);
      if (std::isfinite(interpolated) && interpolated > log_lo + margin &&
          interpolated < log_hi - margin) {
        candidate = interpolated;
      }
    }
    sigma = std::exp(candidate);
    if (!(sigma > lo && sigma < hi)) break;
    d = evaluate(sigma);
    if (!d.ok()) return d.status();
    if (in_window(*d)) return accept();
    const double width_before = log_hi - log_lo;
    if (*d > delta) {
      lo = sigma;
      delta_lo = *d;
    } else {
      hi = sigma;
      delta_hi = *d;
      hi_plds = std::move(last_plds);
    }
    const double width_after = std::log(hi) - std::log(lo);
    stalled = width_after > 0.5 * width_before ? stalled + 1 : 0;
    if (stalled > 2) stalled = 0;
  }
  const double slope = (std::log(delta_hi) - std::log(delta_lo)) /
                       (std::log(hi) - std::log(lo));
  return Calibrated{hi, std::isfinite(slope) ? slope : log_slope,
                    *std::move(hi_plds)};
}

absl::StatusOr<Calibrated> Calibrate(double epsilon, double delta,
                                     double sampling_rate, int64_t steps,
                                     const AccountantOptions& options) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon, "."));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta, "."));
  }
  if (options.grid_spacing <= kCoarseStartSpacing) {
    AccountantOptions coarse = options;
    coarse.grid_spacing = 10.0 * options.grid_spacing;
    absl::StatusOr<Calibrated> start =
        Calibrate(epsilon, delta, sampling_rate, steps, coarse);
    if (start.ok()) {
      return CalibrateFrom(epsilon, delta, sampling_rate, steps, options,
                           start->sigma, std::min(start->log_slope, 0.0));
    }
  }
  return CalibrateFrom(epsilon, delta, sampling_rate, steps, options, 1.0,
                       /*log_slope=*/0.0);
}

}  // namespace

absl::StatusOr<double> CalibrateSigma(double epsilon, double delta,
                                      double sampling_rate, int64_t steps,
                                      const AccountantOptions& options) {
  absl::StatusOr<Calibrated> calibrated =
      Calibrate(epsilon, delta, sampling_rate, steps, options);
  if (!calibrated.ok()) return calibrated.status();
  return calibrated->sigma;
}

absl::StatusOr<CalibratedTradeoff> CalibrateTradeoff(
    double epsilon, double delta, double sampling_rate, int64_t steps,
    const AccountantOptions& options, const EpsilonSweep& sweep) {
  absl::StatusOr<Calibrated> calibrated =
      Calibrate(epsilon, delta, sampling_rate, steps, options);
  if (!calibrated.ok()) return calibrated.status();
  const PrivacyProfile profile = PrivacyProfile::FromPlds(
      calibrated->plds.add, calibrated->plds.remove);
  return CalibratedTradeoff{calibrated->sigma,
                            TradeoffFromProfile(profile, sweep)};
}

absl::StatusOr<TradeoffCurve> DpsgdTradeoff(double noise_multiplier,
                                            double sampling_rate,
                                            int64_t steps,
                                            const AccountantOptions& options,
                                            const EpsilonSweep& sweep) {
  absl::StatusOr<PrivacyProfile> profile =
      DpsgdProfile(noise_multiplier, sampling_rate, steps, options);
  if (!profile.ok()) return profile.status();
  return TradeoffFromProfile(*profile, sweep);
}

}  // namespace hsaudit
