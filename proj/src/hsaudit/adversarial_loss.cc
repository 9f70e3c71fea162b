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

#include "hsaudit/adversarial_loss.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace hsaudit {
namespace {

absl::Status ValidateLrParameters(double sampling_rate,
                                  double noise_multiplier) {
  if (!(sampling_rate >= 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sampling_rate must lie in [0, 1], got ", sampling_rate, "."));
  }
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier, "."));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<EncodingScheme> EncodingScheme::Create(double base) {
  if (!(base >= 1.0) || !std::isfinite(base)) {
    return absl::InvalidArgumentError(
        absl::StrCat("encoding base must be a power of ten >= 1, got ", base,
                     "."));
  }
  const double exponent = std::round(std::log10(base));
  if (std::pow(10.0, exponent) != base || exponent > 15) {
    return absl::InvalidArgumentError(absl::StrCat(
        "encoding base must be a power of ten, got ", base, "."));
  }
  return EncodingScheme(base);
}

absl::StatusOr<EncodingScheme> ChooseScheme(double noise_multiplier) {
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier, "."));
  }
  const double half_width = 1.0 + 5.0 * noise_multiplier;
  double base = 1.0;
  while (base / 2.0 < half_width) base *= 10.0;
  return EncodingScheme::Create(base);
}

absl::StatusOr<double> StepLogLr(double v, double sampling_rate,
                                 double noise_multiplier) {
  if (!std::isfinite(v)) {
    return absl::InvalidArgumentError("residual must be finite.");
  }
  if (absl::Status s = ValidateLrParameters(sampling_rate, noise_multiplier);
      !s.ok()) {
    return s;
  }
  const double q = sampling_rate;
  if (q == 0.0) return 0.0;
  // log N(v; 1, s^2) - log N(v; 0, s^2).
  const double exponent =
      (2.0 * v - 1.0) / (2.0 * noise_multiplier * noise_multiplier);
  if (q == 1.0) return exponent;
  if (exponent > 0.0) {
    return exponent + std::log(q) +
           std::log1p((1.0 - q) / q * std::exp(-exponent));
  }
  return std::log1p(q * std::expm1(exponent));
}

absl::StatusOr<double> Encode(double llr, const EncodingScheme& scheme) {
  if (!(std::abs(llr) <= kMaxEncodableLlr)) {
    return absl::OutOfRangeError(absl::StrCat(
        "log-likelihood ratio ", llr, " is outside the encodable range."));
  }
  return std::round(llr * 100.0) * scheme.base();
}

DecodeResult Decode(double theta, const EncodingScheme& scheme) {
  // nearbyint honours the default round-to-nearest-even mode.
  const double prefix = std::nearbyint(theta / scheme.base()) * scheme.base();
  return {prefix, theta - prefix};
}

absl::StatusOr<AdversarialLoss> AdversarialLoss::Create(
    EncodingScheme scheme, double sampling_rate, double noise_multiplier,
    double expected_batch, double clip_norm) {
  if (absl::Status s = ValidateLrParameters(sampling_rate, noise_multiplier);
      !s.ok()) {
    return s;
  }
  if (!(expected_batch > 0.0) || !std::isfinite(expected_batch)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected_batch must be positive, got ", expected_batch, "."));
  }
  if (!(clip_norm > 0.0)) {
    return absl::InvalidArgumentError("clip_norm must be positive.");
  }
  return AdversarialLoss(scheme, sampling_rate, noise_multiplier,
                         expected_batch, clip_norm);
}

absl::StatusOr<AdversarialLoss> AdversarialLoss::ForHyperParams(
    const HyperParams& hp) {
  if (absl::Status s = hp.Validate(); !s.ok()) return s;
  if (hp.learning_rate != 1.0 || hp.clip_norm != 1.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the adversarial loss requires learning_rate = clip_norm = 1, got ",
        hp.learning_rate, " and ", hp.clip_norm, "."));
  }
  absl::StatusOr<EncodingScheme> scheme = ChooseScheme(hp.noise_multiplier);
  if (!scheme.ok()) return scheme.status();
  return Create(*scheme, hp.sampling_rate, hp.noise_multiplier,
                hp.expected_batch, hp.clip_norm);
}

absl::StatusOr<double> AdversarialLoss::Gradient(double x,
                                                 double theta) const {
  if (theta == 0.0) return -x;
  const DecodeResult decoded = Decode(theta, scheme_);
  absl::StatusOr<double> llr =
      StepLogLr(decoded.residual, sampling_rate_, noise_multiplier_);
  if (!llr.ok()) return llr.status();
  absl::StatusOr<double> encoded = Encode(*llr, scheme_);
  if (!encoded.ok()) return encoded.status();
  const double shared = (decoded.residual - *encoded) / expected_batch_;
  if (std::abs(shared) >= clip_norm_) {
    return absl::FailedPreconditionError(absl::StrCat(
        "encoding gradient ", shared, " at iterate ", theta,
        " reaches the clip norm; increase the expected batch size."));
  }
  return shared - x;
}

absl::StatusOr<double> AdversarialLoss::ExtractLlrSum(
    double final_iterate) const {
  if (!std::isfinite(final_iterate)) {
    return absl::InvalidArgumentError("final iterate must be finite.");
  }
  const DecodeResult decoded = Decode(final_iterate, scheme_);
  absl::StatusOr<double> llr =
      StepLogLr(decoded.residual, sampling_rate_, noise_multiplier_);
  if (!llr.ok()) return llr.status();
  absl::StatusOr<double> encoded = Encode(*llr, scheme_);
  if (!encoded.ok()) return encoded.status();
  return (decoded.prefix + *encoded) / scheme_.extraction_scale();
}

absl::StatusOr<double> AdversarialGradient(double x, double theta,
                                           const EncodingScheme& scheme,
                                           double sampling_rate,
                                           double noise_multiplier,
                                           double expected_batch) {
  absl::StatusOr<AdversarialLoss> loss = AdversarialLoss::Create(
      scheme, sampling_rate, noise_multiplier, expected_batch);
  if (!loss.ok()) return loss.status();
  return loss->Gradient(x, theta);
}

absl::StatusOr<double> ExtractLlrSum(double final_iterate,
                                     const EncodingScheme& scheme,
                                     double sampling_rate,
                                     double noise_multiplier) {
  // The expected batch does not enter the extraction.
  absl::StatusOr<AdversarialLoss> loss =
      AdversarialLoss::Create(scheme, sampling_rate, noise_multiplier, 1.0);
  if (!loss.ok()) return loss.status();
  return loss->ExtractLlrSum(final_iterate);
}

}  // namespace hsaudit
