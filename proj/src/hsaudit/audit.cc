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

#include "hsaudit/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "hsaudit/random.h"

namespace hsaudit {
namespace {

int ResolveWorkers(int workers) {
  if (workers > 0) return workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

bool StrictlyIncreasing(const std::vector<double>& grid) {
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) return false;
  }
  return true;
}

}  // namespace

std::vector<double> DefaultEpsilonGrid() {
  std::vector<double> grid;
  for (int tenths = 5; tenths <= 200; ++tenths) grid.push_back(tenths / 10.0);
  return grid;
}

absl::Status AuditConfig::ValidateForTrials() const {
  if (absl::Status s = ResolvedHyperParams().Validate(); !s.ok()) return s;
  if (num_zeros < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("num_zeros must be >= 1, got ", num_zeros, "."));
  }
  if (trials_per_world < 1) {
    return absl::InvalidArgumentError("trials_per_world must be >= 1.");
  }
  return absl::OkStatus();
}

absl::Status AuditConfig::Validate() const {
  if (absl::Status s = ValidateForTrials(); !s.ok()) return s;
  if (hp.steps < 1) {
    return absl::InvalidArgumentError("an audit needs steps >= 1.");
  }
  if (trials_per_world < 100) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trials_per_world must be >= 100, got ", trials_per_world, "."));
  }
  if (epsilon_grid.empty() || !StrictlyIncreasing(epsilon_grid)) {
    return absl::InvalidArgumentError(
        "epsilon_grid must be non-empty and strictly increasing.");
  }
  if (epsilon_grid.front() <= 0.0) {
    return absl::InvalidArgumentError("epsilon_grid must be positive.");
  }
  if (runs < 1) return absl::InvalidArgumentError("runs must be >= 1.");
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1).");
  }
  return absl::OkStatus();
}

HyperParams AuditConfig::ResolvedHyperParams() const {
  HyperParams resolved = hp;
  resolved.expected_batch =
      hp.sampling_rate * static_cast<double>(num_zeros);
  return resolved;
}

absl::StatusOr<PredictedCurveCache::Entry> PredictedCurveCache::Get(
    double epsilon, double sampling_rate, int64_t steps, double delta,
    const AccountantOptions& options) {
  const Key key{static_cast<int64_t>(std::llround(epsilon * 1e6)),
                sampling_rate, steps, delta, options.grid_spacing};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  absl::StatusOr<Entry> entry = [&]() -> absl::StatusOr<Entry> {
    absl::StatusOr<CalibratedTradeoff> calibrated =
        CalibrateTradeoff(epsilon, delta, sampling_rate, steps, options);
    if (!calibrated.ok()) return calibrated.status();
    return Entry{calibrated->sigma, std::move(calibrated->curve)};
  }();
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.emplace(key, std::move(entry)).first->second;
}

uint64_t TrialSeed(uint64_t run_seed, World world, int64_t trial,
                   int64_t trials_per_world) {
  const uint64_t stream =
      static_cast<uint64_t>(world) * static_cast<uint64_t>(trials_per_world) +
      static_cast<uint64_t>(trial);
  return DeriveSeed(run_seed, stream);
}

absl::StatusOr<ObservationSet> RunWorld(const AuditConfig& config,
                                        const WorstCaseDataset& dataset,
                                        World label,
                                        std::span<const uint64_t> seeds) {
  if (absl::Status s = config.ValidateForTrials(); !s.ok()) return s;
  const HyperParams hp = config.ResolvedHyperParams();
  absl::StatusOr<AdversarialLoss> loss = AdversarialLoss::ForHyperParams(hp);
  if (!loss.ok()) return loss.status();

  const size_t count = seeds.size();
  ObservationSet observations{label, std::vector<double>(count, 0.0)};
  std::vector<absl::Status> failures(count);

  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      absl::StatusOr<DpsgdResult> run =
          RunDpsgdStructured(dataset, *loss, hp, seeds[i]);
      if (!run.ok()) {
        failures[i] = run.status();
        return;
      }
      absl::StatusOr<double> llr = loss->ExtractLlrSum(run->final_iterate);
      if (!llr.ok()) {
        failures[i] = llr.status();
        return;
      }
      observations.values[i] = *llr;
    }
  };

  const size_t workers = std::min<size_t>(
      static_cast<size_t>(ResolveWorkers(config.workers)),
      std::max<size_t>(count, 1));
  if (workers <= 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> threads;
    const size_t chunk = (count + workers - 1) / workers;
    for (size_t begin = 0; begin < count; begin += chunk) {
      threads.emplace_back(work, begin, std::min(count, begin + chunk));
    }
  }
  for (size_t i = 0; i < count; ++i) {
    if (!failures[i].ok()) {
      return absl::Status(failures[i].code(),
                          absl::StrCat("trial ", i, ": ",
                                       failures[i].message()));
    }
  }
  return observations;
}

absl::StatusOr<std::pair<ObservationSet, ObservationSet>> RunTrials(
    const AuditConfig& config, uint64_t run_seed) {
  const int64_t r = config.trials_per_world;
  std::vector<uint64_t> seeds(static_cast<size_t>(r));
  std::pair<ObservationSet, ObservationSet> result;
  for (World world : {World::kWithoutTarget, World::kWithTarget}) {
    for (int64_t t = 0; t < r; ++t) {
      seeds[static_cast<size_t>(t)] = TrialSeed(run_seed, world, t, r);
    }
    const WorstCaseDataset dataset{config.num_zeros,
                                   world == World::kWithTarget};
    absl::StatusOr<ObservationSet> observations =
        RunWorld(config, dataset, world, seeds);
    if (!observations.ok()) return observations.status();
    (world == World::kWithoutTarget ? result.first : result.second) =
        *std::move(observations);
  }
  return result;
}

RocCurve RocFromObservations(const ObservationSet& without_target,
                             const ObservationSet& with_target) {
  std::vector<double> null_sorted = without_target.values;
  std::vector<double> alt_sorted = with_target.values;
  std::sort(null_sorted.begin(), null_sorted.end());
  std::sort(alt_sorted.begin(), alt_sorted.end());
  std::vector<double> thresholds = null_sorted;
  thresholds.insert(thresholds.end(), alt_sorted.begin(), alt_sorted.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  RocCurve roc;
  roc.points.reserve(thresholds.size());
  const double n_null = static_cast<double>(null_sorted.size());
  const double n_alt = static_cast<double>(alt_sorted.size());
  size_t null_below = 0;  // |{o in O : o < tau}|
  size_t alt_below = 0;   // |{o in O' : o < tau}|
  for (double tau : thresholds) {
    while (null_below < null_sorted.size() && null_sorted[null_below] < tau) {
      ++null_below;
    }
    while (alt_below < alt_sorted.size() && alt_sorted[alt_below] < tau) {
      ++alt_below;
    }
    roc.points.push_back(
        {static_cast<double>(null_sorted.size() - null_below) / n_null,
         static_cast<double>(alt_below) / n_alt, tau});
  }
  return roc;
}

absl::StatusOr<EpsilonEstimate> EstimateEpsilon(
    const RocCurve& roc, const AuditConfig& config, PredictedCurveCache& cache,
    std::vector<std::string>* warnings) {
  if (config.epsilon_grid.empty()) {
    return absl::InvalidArgumentError("epsilon_grid is empty.");
  }
  const HyperParams& hp = config.hp;
  std::vector<const RocPoint*> interior;
  for (const RocPoint& p : roc.points) {
    if (p.alpha > 0.0 && p.alpha < 1.0) interior.push_back(&p);
  }
  // A grid point that cannot be calibrated counts as violated, which is what
  // skipping it in an ascending scan amounts to.
  auto violated = [&](double eps) {
    absl::StatusOr<PredictedCurveCache::Entry> entry =
        cache.Get(eps, hp.sampling_rate, hp.steps, config.delta,
                  config.accountant);
    if (!entry.ok()) {
      if (warnings != nullptr) {
        warnings->push_back(absl::StrCat("skipped epsilon ", eps, ": ",
                                         entry.status().message()));
      }
      return true;
    }
    for (const RocPoint* p : interior) {
      if (p->beta < entry->curve(p->alpha)) return true;
    }
    return false;
  };
  // Predicted curves fall as epsilon grows, so violations form a prefix of
  // the grid and the first non-violated point is found by bisection.
  size_t lo = 0;
  size_t hi = config.epsilon_grid.size();
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (violated(config.epsilon_grid[mid])) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < config.epsilon_grid.size()) {
    return EpsilonEstimate{config.epsilon_grid[lo], false};
  }
  return EpsilonEstimate{config.epsilon_grid.back(), true};
}

absl::StatusOr<AuditReport> RunAudit(const AuditConfig& config,
                                     PredictedCurveCache* cache) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  PredictedCurveCache local_cache;
  if (cache == nullptr) cache = &local_cache;

  AuditReport report;
  report.hp = config.ResolvedHyperParams();
  report.num_zeros = config.num_zeros;
  report.trials_per_world = config.trials_per_world;
  report.master_seed = config.master_seed;
  report.delta = config.delta;
  report.target_epsilon = config.target_epsilon;

  for (int run = 0; run < config.runs; ++run) {
    const uint64_t run_seed =
        DeriveSeed(config.master_seed, static_cast<uint64_t>(run));
    auto trials = RunTrials(config, run_seed);
    if (!trials.ok()) {
      return absl::Status(trials.status().code(),
                          absl::StrCat("run ", run, ": ",
                                       trials.status().message()));
    }
    RocCurve roc = RocFromObservations(trials->first, trials->second);
    absl::StatusOr<EpsilonEstimate> estimate =
        EstimateEpsilon(roc, config, *cache, &report.warnings);
    if (!estimate.ok()) return estimate.status();
    report.per_run.push_back(*estimate);
    if (run == 0) report.observed = std::move(roc);
  }

  std::vector<double> values;
  for (const EpsilonEstimate& e : report.per_run) {
    if (!e.exceeds_grid) values.push_back(e.value);
  }
  if (values.empty()) {
    report.mean = std::numeric_limits<double>::quiet_NaN();
    report.std_dev = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (double v : values) sum += v;
    report.mean = sum / static_cast<double>(values.size());
    double squares = 0.0;
    for (double v : values) squares += (v - report.mean) * (v - report.mean);
    report.std_dev =
        values.size() > 1
            ? std::sqrt(squares / static_cast<double>(values.size() - 1))
            : 0.0;
  }

  const std::vector<double> alphas = PlotAlphaGrid();
  absl::StatusOr<TradeoffCurve> pld = DpsgdTradeoff(
      report.hp.noise_multiplier, report.hp.sampling_rate, report.hp.steps,
      config.accountant);
  if (!pld.ok()) return pld.status();
  report.pld_curve = pld->Sample(alphas);
  absl::StatusOr<TradeoffCurve> mog = MogTradeoff(
      report.hp.noise_multiplier, report.hp.sampling_rate, report.hp.steps);
  if (!mog.ok()) return mog.status();
  report.mog_curve = mog->Sample(alphas);
  return report;
}

}  // namespace hsaudit
