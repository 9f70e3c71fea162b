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

// Privacy accounting for DP-SGD with all iterates released: composed PLDs of
// the subsampled Gaussian mechanism, noise calibration and the predicted
// trade-off curve.

#ifndef HSAUDIT_ACCOUNTANT_H_
#define HSAUDIT_ACCOUNTANT_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "hsaudit/privacy_loss_distribution.h"
#include "hsaudit/tradeoff.h"

namespace hsaudit {

struct AccountantOptions {
  double grid_spacing = 1e-4;
  // Outcome mass discarded (into infinity_mass) when discretizing one step.
  double truncation_mass = 1e-12;
  CompositionOptions composition;
};

struct ComposedPlds {
  PrivacyLossDistribution add;
  PrivacyLossDistribution remove;
};

// `steps`-fold composition of the subsampled Gaussian PLD, both directions.
absl::StatusOr<ComposedPlds> ComposeDpsgd(double noise_multiplier,
                                          double sampling_rate, int64_t steps,
                                          const AccountantOptions& options = {});

absl::StatusOr<PrivacyProfile> DpsgdProfile(
    double noise_multiplier, double sampling_rate, int64_t steps,
    const AccountantOptions& options = {});

// Worst-direction delta of DP-SGD at `epsilon`.
absl::StatusOr<double> DpsgdDelta(double epsilon, double noise_multiplier,
                                  double sampling_rate, int64_t steps,
                                  const AccountantOptions& options = {});

// Relative width of the accepted delta window in CalibrateSigma.
inline constexpr double kCalibrationRelativeTolerance = 1e-3;
inline constexpr double kMinCalibratedSigma = 1e-2;
inline constexpr double kMaxCalibratedSigma = 1e3;

// Noise multiplier for which DP-SGD's worst-direction delta at `epsilon`
// lies in [delta * (1 - 1e-3), delta]. Bracketed root finding on log delta
// over log sigma within [1e-2, 1e3]; deterministic.
absl::StatusOr<double> CalibrateSigma(double epsilon, double delta,
                                      double sampling_rate, int64_t steps,
                                      const AccountantOptions& options = {});

struct CalibratedTradeoff {
  double sigma;
  TradeoffCurve curve;
};

// CalibrateSigma together with the trade-off curve at the calibrated noise
// multiplier, reusing the compositions of the final calibration step.
absl::StatusOr<CalibratedTradeoff> CalibrateTradeoff(
    double epsilon, double delta, double sampling_rate, int64_t steps,
    const AccountantOptions& options = {}, const EpsilonSweep& sweep = {});

// Symmetric trade-off curve of DP-SGD at the given noise multiplier.
absl::StatusOr<TradeoffCurve> DpsgdTradeoff(
    double noise_multiplier, double sampling_rate, int64_t steps,
    const AccountantOptions& options = {}, const EpsilonSweep& sweep = {});

}  // namespace hsaudit

#endif  // HSAUDIT_ACCOUNTANT_H_
