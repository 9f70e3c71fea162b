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

// Monte Carlo audit of hidden-state DP-SGD under the adversarial loss: paired
// trials on the worst-case neighbours, the observed FPR/FNR curve, and the
// empirical epsilon obtained by comparing it with accountant predictions.

#ifndef HSAUDIT_AUDIT_H_
#define HSAUDIT_AUDIT_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "hsaudit/accountant.h"
#include "hsaudit/hyperparams.h"
#include "hsaudit/mechanism.h"
#include "hsaudit/tradeoff.h"

namespace hsaudit {

enum class World { kWithoutTarget = 0, kWithTarget = 1 };

// {0.5, 0.6, ..., 20.0}.
std::vector<double> DefaultEpsilonGrid();

struct AuditConfig {
  // expected_batch is derived as sampling_rate * num_zeros.
  HyperParams hp;
  int64_t num_zeros = 10'000'000'000;
  int64_t trials_per_world = 5000;
  uint64_t master_seed = 0;
  std::vector<double> epsilon_grid = DefaultEpsilonGrid();
  int runs = 5;
  double delta = 1e-5;
  // 0 selects the number of hardware threads.
  int workers = 0;
  AccountantOptions accountant;
  // Privacy level hp.noise_multiplier was calibrated for, if any. Echoed in
  // the report only.
  std::optional<double> target_epsilon;

  // Checks everything RunTrials needs.
  absl::Status ValidateForTrials() const;
  // Additionally requires at least 100 trials per world and a strictly
  // increasing epsilon grid.
  absl::Status Validate() const;

  HyperParams ResolvedHyperParams() const;
};

struct ObservationSet {
  World world = World::kWithoutTarget;
  std::vector<double> values;
};

struct RocPoint {
  double alpha;
  double beta;
  double threshold;
};

// Points ordered by increasing threshold.
struct RocCurve {
  std::vector<RocPoint> points;
};

struct EpsilonEstimate {
  double value = 0.0;
  // No grid epsilon is consistent with the observations; value holds the
  // largest grid element.
  bool exceeds_grid = false;
};

struct AuditReport {
  HyperParams hp;
  int64_t num_zeros = 0;
  int64_t trials_per_world = 0;
  uint64_t master_seed = 0;
  double delta = 0.0;
  std::optional<double> target_epsilon;
  std::vector<EpsilonEstimate> per_run;
  // Over runs that did not exceed the grid.
  double mean = 0.0;
  double std_dev = 0.0;
  // Observed curve of the first run and the two predicted curves at
  // hp.noise_multiplier, for plotting.
  RocCurve observed;
  std::vector<CurvePoint> pld_curve;
  std::vector<CurvePoint> mog_curve;
  std::vector<std::string> warnings;
};

// Predicted trade-off curves keyed by (epsilon, q, T, delta, grid spacing),
// computed once and shared between runs. Safe for concurrent use.
class PredictedCurveCache {
 public:
  struct Entry {
    double noise_multiplier;
    TradeoffCurve curve;
  };

  absl::StatusOr<Entry> Get(double epsilon, double sampling_rate,
                            int64_t steps, double delta,
                            const AccountantOptions& options);

 private:
  using Key = std::tuple<int64_t, double, int64_t, double, double>;
  std::mutex mutex_;
  std::map<Key, absl::StatusOr<Entry>> entries_;
};

// Seed of trial `trial` in `world` for a run seeded with `run_seed`: stream
// index world * R + trial.
uint64_t TrialSeed(uint64_t run_seed, World world, int64_t trial,
                   int64_t trials_per_world);

// Runs one structured DP-SGD trial per seed on `dataset` and extracts the
// log-likelihood-ratio sum from each final iterate. Fans out over workers;
// output order follows `seeds`.
absl::StatusOr<ObservationSet> RunWorld(const AuditConfig& config,
                                        const WorstCaseDataset& dataset,
                                        World label,
                                        std::span<const uint64_t> seeds);

// R trials on D (no target) and R on D' (with target).
absl::StatusOr<std::pair<ObservationSet, ObservationSet>> RunTrials(
    const AuditConfig& config, uint64_t run_seed);

// One point per distinct observed value tau: alpha = |{o in O : o >= tau}|
// / |O|, beta = |{o in O' : o < tau}| / |O'|.
RocCurve RocFromObservations(const ObservationSet& without_target,
                             const ObservationSet& with_target);

// First grid epsilon, ascending, whose predicted curve lies on or below
// every observed point with alpha in (0, 1). Grid points whose calibration
// fails are skipped and reported through `warnings`. Relies on the predicted
// curves decreasing in epsilon: probes the grid by bisection instead of
// calibrating every element.
absl::StatusOr<EpsilonEstimate> EstimateEpsilon(
    const RocCurve& roc, const AuditConfig& config, PredictedCurveCache& cache,
    std::vector<std::string>* warnings = nullptr);

// `config.runs` independent audits with disjoint seed streams.
absl::StatusOr<AuditReport> RunAudit(const AuditConfig& config,
                                     PredictedCurveCache* cache = nullptr);

}  // namespace hsaudit

#endif  // HSAUDIT_AUDIT_H_
