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

#ifndef HSAUDIT_HYPERPARAMS_H_
#define HSAUDIT_HYPERPARAMS_H_

#include <cstdint>

#include "absl/status/status.h"

namespace hsaudit {

// DP-SGD knobs shared by the simulators, the adversarial loss and the audit.
struct HyperParams {
  double learning_rate = 1.0;
  double clip_norm = 1.0;
  double noise_multiplier = 1.0;
  double sampling_rate = 1.0;
  int64_t steps = 1;
  // Expected number of sampled records per step, q * |D| for the smaller of
  // the two neighbouring datasets. Must be the same in both worlds.
  double expected_batch = 1.0;

  // Zero steps is accepted and yields the initial iterate unchanged.
  absl::Status Validate() const;
};

}  // namespace hsaudit

#endif  // HSAUDIT_HYPERPARAMS_H_
