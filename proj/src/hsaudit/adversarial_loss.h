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

// Worst-case non-convex loss for one-dimensional DP-SGD. The gradient decodes
// the running log-likelihood-ratio sum stored in the high digits of the
// iterate, runs the per-step likelihood ratio test on the low-digit residual
// and re-encodes the updated sum, so that the final iterate carries the
// evidence of the whole trajectory.

#ifndef HSAUDIT_ADVERSARIAL_LOSS_H_
#define HSAUDIT_ADVERSARIAL_LOSS_H_

#include "absl/status/statusor.h"
#include "hsaudit/hyperparams.h"

namespace hsaudit {

// Largest |L| accepted by Encode().
inline constexpr double kMaxEncodableLlr = 1e6;

// Decimal layout of the encoding. Log-likelihood ratios are kept to two
// decimal places and stored as multiples of `base`, leaving the interval
// (-base/2, base/2) for the fresh gradient and noise of the next step.
class EncodingScheme {
 public:
  // `base` must be a positive power of ten.
  static absl::StatusOr<EncodingScheme> Create(double base);

  double base() const { return base_; }
  // Factor between an encoded prefix and the log-likelihood-ratio sum.
  double extraction_scale() const { return 100.0 * base_; }

 private:
  explicit EncodingScheme(double base) : base_(base) {}

  double base_;
};

// Smallest power of ten E with E/2 >= 1 + 5 * sigma.
absl::StatusOr<EncodingScheme> ChooseScheme(double noise_multiplier);

struct DecodeResult {
  double prefix;    // Nearest multiple of the base.
  double residual;  // iterate - prefix, exact.
};

// ln(q * N(v; 1, sigma^2) / N(v; 0, sigma^2) + 1 - q), evaluated without
// overflow for large |v|.
absl::StatusOr<double> StepLogLr(double v, double sampling_rate,
                                 double noise_multiplier);

// round(L * 100) * base, rounding half away from zero.
absl::StatusOr<double> Encode(double llr, const EncodingScheme& scheme);

// Splits theta into the nearest multiple of the base (ties to the even
// multiple) and the residual.
DecodeResult Decode(double theta, const EncodingScheme& scheme);

// The adversarial per-record gradient bound to its global hyper-parameters.
class AdversarialLoss {
 public:
  static absl::StatusOr<AdversarialLoss> Create(EncodingScheme scheme,
                                                double sampling_rate,
                                                double noise_multiplier,
                                                double expected_batch,
                                                double clip_norm = 1.0);

  // Builds the loss for `hp`, choosing the scheme from the noise multiplier.
  // The likelihood ratio test assumes unit learning rate and clip norm.
  static absl::StatusOr<AdversarialLoss> ForHyperParams(const HyperParams& hp);

  // Gradient of record `x` at the previous iterate `theta`. At theta == 0
  // (first step) it is -x. Otherwise it is (v - Encode(L(v))) / N - x, where
  // (prefix, v) = Decode(theta). Under the subtractive update with N zero
  // records sampled, the next iterate is prefix + Encode(L(v)) + fresh
  // target contribution + noise.
  //
  // Fails if the record-independent part reaches the clip norm, since the
  // clipped encoding could no longer be reassembled.
  absl::StatusOr<double> Gradient(double x, double theta) const;

  // Decoded running sum plus the quantised likelihood ratio of the final
  // residual, approximating the full log-likelihood-ratio sum.
  absl::StatusOr<double> ExtractLlrSum(double final_iterate) const;

  const EncodingScheme& scheme() const { return scheme_; }
  double sampling_rate() const { return sampling_rate_; }
  double noise_multiplier() const { return noise_multiplier_; }
  double expected_batch() const { return expected_batch_; }
  double clip_norm() const { return clip_norm_; }

 private:
  AdversarialLoss(EncodingScheme scheme, double sampling_rate,
                  double noise_multiplier, double expected_batch,
                  double clip_norm)
      : scheme_(scheme),
        sampling_rate_(sampling_rate),
        noise_multiplier_(noise_multiplier),
        expected_batch_(expected_batch),
        clip_norm_(clip_norm) {}

  EncodingScheme scheme_;
  double sampling_rate_;
  double noise_multiplier_;
  double expected_batch_;
  double clip_norm_;
};

// Free-function forms of the loss, used by the C API and tests.
absl::StatusOr<double> AdversarialGradient(double x, double theta,
                                           const EncodingScheme& scheme,
                                           double sampling_rate,
                                           double noise_multiplier,
                                           double expected_batch);
absl::StatusOr<double> ExtractLlrSum(double final_iterate,
                                     const EncodingScheme& scheme,
                                     double sampling_rate,
                                     double noise_multiplier);

}  // namespace hsaudit

#endif  // HSAUDIT_ADVERSARIAL_LOSS_H_
