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

// One-dimensional DP-SGD: a literal per-record simulator and a structured
// fast path for datasets made of zeros plus an optional target record.

#ifndef HSAUDIT_MECHANISM_H_
#define HSAUDIT_MECHANISM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "hsaudit/adversarial_loss.h"
#include "hsaudit/hyperparams.h"
#include "hsaudit/random.h"

namespace hsaudit {

inline constexpr double kInitialIterate = 0.0;

// Iterates must stay below this magnitude so that multiples of the encoding
// base remain exactly representable.
inline constexpr double kMaxIterateMagnitude = 1099511627776.0;  // 2^40

// D = {0, ..., 0} or D' = D u {1}.
struct WorstCaseDataset {
  int64_t num_zeros = 0;
  bool contains_target = false;

  int64_t size() const { return num_zeros + (contains_target ? 1 : 0); }
  // Records in the order the explicit simulator visits them.
  std::vector<double> Materialize() const;
};

struct Trajectory {
  std::vector<double> iterates;  // theta_0 .. theta_T
};

struct DpsgdResult {
  double final_iterate = kInitialIterate;
  std::optional<Trajectory> trajectory;
};

// Per-record gradient as a function of (record, previous iterate).
using GradientFn = std::function<absl::StatusOr<double>(double, double)>;

// Called with every clipped per-record gradient that enters a step's sum.
using ContributionObserver = std::function<void(int64_t step, double)>;

struct SimulationOptions {
  bool keep_trajectory = false;
  ContributionObserver observer;
};

// Truncates |gradient| to at most clip_norm.
double ClipGradient(double gradient, double clip_norm);

// theta_{k+1} = theta_k - lr * (sum of clipped gradients over a Poisson
// sample of `records` + N(0, (C sigma)^2)). Per step, draws one Bernoulli
// per record in order, then one standard normal.
absl::StatusOr<DpsgdResult> RunDpsgdExplicit(
    std::span<const double> records, const GradientFn& gradient,
    const HyperParams& hp, DrawSource& draws,
    const SimulationOptions& options = {});
absl::StatusOr<DpsgdResult> RunDpsgdExplicit(
    std::span<const double> records, const GradientFn& gradient,
    const HyperParams& hp, uint64_t seed,
    const SimulationOptions& options = {});

// Same distribution as RunDpsgdExplicit on dataset.Materialize() with the
// adversarial loss, in O(steps) work. Per step it draws the number of zero
// records sampled, then whether the target is sampled, then the noise.
absl::StatusOr<DpsgdResult> RunDpsgdStructured(
    const WorstCaseDataset& dataset, const AdversarialLoss& loss,
    const HyperParams& hp, DrawSource& draws,
    const SimulationOptions& options = {});
absl::StatusOr<DpsgdResult> RunDpsgdStructured(
    const WorstCaseDataset& dataset, const AdversarialLoss& loss,
    const HyperParams& hp, uint64_t seed,
    const SimulationOptions& options = {});

}  // namespace hsaudit

#endif  // HSAUDIT_MECHANISM_H_
