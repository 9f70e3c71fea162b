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

#include "hsaudit/mechanism.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace hsaudit {
namespace {

absl::Status CheckIterate(double theta, int64_t step) {
  if (!std::isfinite(theta)) {
    return absl::OutOfRangeError(
        absl::StrCat("iterate became non-finite at step ", step, "."));
  }
  if (std::abs(theta) >= kMaxIterateMagnitude) {
    return absl::OutOfRangeError(absl::StrCat(
        "iterate ", theta, " at step ", step, " exceeds 2^40 in magnitude."));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ClippedGradient(const GradientFn& gradient,
                                       double record, double theta,
                                       double clip_norm, int64_t step) {
  absl::StatusOr<double> g = gradient(record, theta);
  if (!g.ok()) {
    return absl::Status(g.status().code(),
                        absl::StrCat("step ", step, ": ", g.status().message()));
  }
  if (!std::isfinite(*g)) {
    return absl::OutOfRangeError(
        absl::StrCat("non-finite gradient at step ", step, "."));
  }
  return ClipGradient(*g, clip_norm);
}

}  // namespace

std::vector<double> WorstCaseDataset::Materialize() const {
  std::vector<double> records(static_cast<size_t>(num_zeros), 0.0);
  if (contains_target) records.push_back(1.0);
  return records;
}

double ClipGradient(double gradient, double clip_norm) {
  if (gradient > clip_norm) return clip_norm;
  if (gradient < -clip_norm) return -clip_norm;
  return gradient;
}

absl::StatusOr<DpsgdResult> RunDpsgdExplicit(
    std::span<const double> records, const GradientFn& gradient,
    const HyperParams& hp, DrawSource& draws,
    const SimulationOptions& options) {
  if (absl::Status s = hp.Validate(); !s.ok()) return s;
  for (double r : records) {
    if (!std::isfinite(r)) {
      return absl::InvalidArgumentError("records must be finite.");
    }
  }
  DpsgdResult result;
  if (options.keep_trajectory) {
    result.trajectory.emplace();
    result.trajectory->iterates.reserve(static_cast<size_t>(hp.steps) + 1);
    result.trajectory->iterates.push_back(kInitialIterate);
  }
  const double noise_scale = hp.clip_norm * hp.noise_multiplier;
  double theta = kInitialIterate;
  for (int64_t step = 0; step < hp.steps; ++step) {
    double sum = 0.0;
    for (double record : records) {
      if (!draws.Bernoulli(hp.sampling_rate)) continue;
      absl::StatusOr<double> g =
          ClippedGradient(gradient, record, theta, hp.clip_norm, step);
      if (!g.ok()) return g.status();
      if (options.observer) options.observer(step, *g);
      sum += *g;
    }
    const double noise = noise_scale * draws.StandardNormal();
    theta -= hp.learning_rate * (sum + noise);
    if (absl::Status s = CheckIterate(theta, step + 1); !s.ok()) return s;
    if (result.trajectory) result.trajectory->iterates.push_back(theta);
  }
  result.final_iterate = theta;
  return result;
}

absl::StatusOr<DpsgdResult> RunDpsgdExplicit(
    std::span<const double> records, const GradientFn& gradient,
    const HyperParams& hp, uint64_t seed, const SimulationOptions& options) {
  RandomDraws draws(seed);
  return RunDpsgdExplicit(records, gradient, hp, draws, options);
}

absl::StatusOr<DpsgdResult> RunDpsgdStructured(
    const WorstCaseDataset& dataset, const AdversarialLoss& loss,
    const HyperParams& hp, DrawSource& draws,
    const SimulationOptions& options) {
  if (absl::Status s = hp.Validate(); !s.ok()) return s;
  if (dataset.num_zeros < 0) {
    return absl::InvalidArgumentError("num_zeros must be non-negative.");
  }
  DpsgdResult result;
  if (options.keep_trajectory) {
    result.trajectory.emplace();
    result.trajectory->iterates.reserve(static_cast<size_t>(hp.steps) + 1);
    result.trajectory->iterates.push_back(kInitialIterate);
  }
  const double noise_scale = hp.clip_norm * hp.noise_multiplier;
  const double target_probability =
      dataset.contains_target ? hp.sampling_rate : 0.0;
  double theta = kInitialIterate;
  for (int64_t step = 0; step < hp.steps; ++step) {
    const int64_t zeros_sampled =
        draws.Binomial(dataset.num_zeros, hp.sampling_rate);
    const bool target_sampled = draws.Bernoulli(target_probability);
    double sum = 0.0;
    if (zeros_sampled > 0) {
      absl::StatusOr<double> g0 = loss.Gradient(0.0, theta);
      if (!g0.ok()) {
        return absl::Status(
            g0.status().code(),
            absl::StrCat("step ", step, ": ", g0.status().message()));
      }
      if (std::abs(*g0) > hp.clip_norm) {
        return absl::FailedPreconditionError(absl::StrCat(
            "step ", step, ": zero-record gradient ", *g0,
            " exceeds the clip norm."));
      }
      if (options.observer) options.observer(step, *g0);
      sum += static_cast<double>(zeros_sampled) * *g0;
    }
    if (target_sampled) {
      absl::StatusOr<double> g1 = ClippedGradient(
          [&loss](double x, double t) { return loss.Gradient(x, t); }, 1.0,
          theta, hp.clip_norm, step);
      if (!g1.ok()) return g1.status();
      if (options.observer) options.observer(step, *g1);
      sum += *g1;
    }
    const double noise = noise_scale * draws.StandardNormal();
    theta -= hp.learning_rate * (sum + noise);
    if (absl::Status s = CheckIterate(theta, step + 1); !s.ok()) return s;
    if (result.trajectory) result.trajectory->iterates.push_back(theta);
  }
  result.final_iterate = theta;
  return result;
}

absl::StatusOr<DpsgdResult> RunDpsgdStructured(
    const WorstCaseDataset& dataset, const AdversarialLoss& loss,
    const HyperParams& hp, uint64_t seed, const SimulationOptions& options) {
  RandomDraws draws(seed);
  return RunDpsgdStructured(dataset, loss, hp, draws, options);
}

}  // namespace hsaudit
