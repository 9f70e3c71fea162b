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

#include "hsaudit/hyperparams.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace hsaudit {

absl::Status HyperParams::Validate() const {
  if (!std::isfinite(learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be finite.");
  }
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip_norm must be positive, got ", clip_norm, "."));
  }
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier, "."));
  }
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sampling_rate must lie in (0, 1], got ", sampling_rate, "."));
  }
  if (steps < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("steps must be non-negative, got ", steps, "."));
  }
  if (!(expected_batch > 0.0) || !std::isfinite(expected_batch)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected_batch must be positive, got ", expected_batch, "."));
  }
  return absl::OkStatus();
}

}  // namespace hsaudit
