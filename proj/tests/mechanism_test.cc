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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "scripted_draws.h"

namespace hsaudit {
namespace {

using testing_util::ExplicitScript;
using testing_util::SampleStepDraws;
using testing_util::StepDraws;
using testing_util::StructuredScript;

HyperParams Params(double q, double sigma, int64_t steps, double batch) {
  HyperParams hp;
  hp.sampling_rate = q;
  hp.noise_multiplier = sigma;
  hp.steps = steps;
  hp.expected_batch = batch;
  return hp;
}

absl::StatusOr<double> Identity(double x, double) { return x; }

double StdDev(const std::vector<double>& xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (xs.size() - 1));
}

// Two-sample Kolmogorov-Smirnov statistic.
double KsStatistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

TEST(ClipGradient, TruncatesMagnitude) {
  EXPECT_EQ(ClipGradient(3.0, 1.0), 1.0);
  EXPECT_EQ(ClipGradient(-3.0, 1.0), -1.0);
  EXPECT_EQ(ClipGradient(0.25, 1.0), 0.25);
}

TEST(WorstCaseDataset, MaterializesTargetLast) {
  WorstCaseDataset d{3, true};
  EXPECT_EQ(d.size(), 4);
  EXPECT_EQ(d.Materialize(), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ((WorstCaseDataset{2, false}).size(), 2);
}

TEST(RunDpsgdExplicit, EmptyDatasetIsGaussianRandomWalk) {
  HyperParams hp = Params(0.5, 2.0, 50, 1);
  hp.learning_rate = 0.5;
  hp.clip_norm = 3.0;
  std::vector<double> increments;
  for (uint64_t seed = 0; seed < 400; ++seed) {
    SimulationOptions opts;
    opts.keep_trajectory = true;
    absl::StatusOr<DpsgdResult> r =
        RunDpsgdExplicit({}, Identity, hp, seed, opts);
    ASSERT_TRUE(r.ok());
    const std::vector<double>& it = r->trajectory->iterates;
    ASSERT_EQ(it.size(), 51u);
    EXPECT_EQ(it.front(), 0.0);
    EXPECT_EQ(it.back(), r->final_iterate);
    for (size_t k = 1; k < it.size(); ++k) increments.push_back(it[k] - it[k - 1]);
  }
  EXPECT_NEAR(StdDev(increments), 0.5 * 3.0 * 2.0, 0.05 * 3.0);
}

TEST(RunDpsgdExplicit, SingleStepNoiseStdMatchesClosedForm) {
  const HyperParams hp = Params(0.3, 1.7, 1, 1);
  const std::vector<double> zeros(20, 0.0);
  std::vector<double> finals;
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    finals.push_back(
        RunDpsgdExplicit(zeros, Identity, hp, seed)->final_iterate);
  }
  EXPECT_NEAR(StdDev(finals), 1.7, 0.05 * 1.7);
}

TEST(RunDpsgdExplicit, FirstIterateIsSymmetricWithoutTarget) {
  const HyperParams hp = Params(0.5, 1.0, 1, 1);
  const std::vector<double> zeros(5, 0.0);
  std::vector<double> finals;
  double m2 = 0, m3 = 0;
  for (uint64_t seed = 0; seed < 100000; ++seed) {
    const double x =
        RunDpsgdExplicit(zeros, Identity, hp, seed)->final_iterate;
    finals.push_back(x);
  }
  double mean = 0;
  for (double x : finals) mean += x;
  mean /= finals.size();
  for (double x : finals) {
    m2 += (x - mean) * (x - mean);
    m3 += (x - mean) * (x - mean) * (x - mean);
  }
  m2 /= finals.size();
  m3 /= finals.size();
  EXPECT_LT(std::abs(m3 / std::pow(m2, 1.5)), 0.1);
}

TEST(RunDpsgdExplicit, ClippingSaturates) {
  HyperParams hp = Params(1.0, 1.0, 3, 1);
  hp.clip_norm = 0.5;
  const std::vector<double> one = {1.0};
  std::vector<double> seen;
  SimulationOptions opts;
  opts.observer = [&](int64_t, double g) { seen.push_back(g); };
  ASSERT_TRUE(RunDpsgdExplicit(one, Identity, hp, 1, opts).ok());
  EXPECT_EQ(seen, (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(RunDpsgdExplicit, EveryContributionIsClipped) {
  HyperParams hp = Params(0.6, 0.3, 20, 1);
  hp.clip_norm = 0.7;
  const std::vector<double> records = {-5, -0.2, 0, 0.4, 3, 100};
  int64_t count = 0;
  SimulationOptions opts;
  opts.observer = [&](int64_t, double g) {
    ++count;
    EXPECT_LE(std::abs(g), hp.clip_norm);
  };
  auto grad = [](double x, double theta) -> absl::StatusOr<double> {
    return x * (1 + theta * theta);
  };
  ASSERT_TRUE(RunDpsgdExplicit(records, grad, hp, 9, opts).ok());
  EXPECT_GT(count, 0);
}

TEST(RunDpsgdExplicit, ZeroStepsReturnsInitialIterate) {
  const HyperParams hp = Params(0.5, 1.0, 0, 1);
  SimulationOptions opts;
  opts.keep_trajectory = true;
  absl::StatusOr<DpsgdResult> r =
      RunDpsgdExplicit(std::vector<double>{1.0}, Identity, hp, 3, opts);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->final_iterate, 0.0);
  EXPECT_EQ(r->trajectory->iterates, std::vector<double>{0.0});
}

TEST(RunDpsgdExplicit, NonFiniteIterateNamesStep) {
  const HyperParams hp = Params(1.0, 1.0, 5, 1);
  int calls = 0;
  auto grad = [&](double, double) -> absl::StatusOr<double> {
    return ++calls == 3 ? std::nan("") : 0.0;
  };
  absl::StatusOr<DpsgdResult> r =
      RunDpsgdExplicit(std::vector<double>{0.0}, grad, hp, 1);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.status().message().find("step 2"), std::string::npos)
      << r.status();
}

TEST(RunDpsgdExplicit, SeedDeterminism) {
  const HyperParams hp = Params(0.3, 0.8, 40, 1);
  const std::vector<double> records = {0, 0, 1, 0.5};
  const double a = RunDpsgdExplicit(records, Identity, hp, 77)->final_iterate;
  const double b = RunDpsgdExplicit(records, Identity, hp, 77)->final_iterate;
  const double c = RunDpsgdExplicit(records, Identity, hp, 78)->final_iterate;
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

class StructuredTest : public ::testing::Test {
 protected:
  static AdversarialLoss Loss(const HyperParams& hp) {
    return *AdversarialLoss::ForHyperParams(hp);
  }
  static GradientFn Gradient(const AdversarialLoss& loss) {
    return [&loss](double x, double t) { return loss.Gradient(x, t); };
  }
};

TEST_F(StructuredTest, EmptyDatasetMatchesExplicitStream) {
  const HyperParams hp = Params(0.1, 0.5, 30, 1);
  const AdversarialLoss loss = Loss(hp);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(RunDpsgdStructured({0, false}, loss, hp, seed)->final_iterate,
              RunDpsgdExplicit({}, Gradient(loss), hp, seed)->final_iterate);
  }
}

TEST_F(StructuredTest, SharedDrawsGiveExplicitResult) {
  const HyperParams hp = Params(0.1, 0.5, 10, 1e5);
  const AdversarialLoss loss = Loss(hp);
  for (bool target : {false, true}) {
    const WorstCaseDataset ds{1000, target};
    const std::vector<double> records = ds.Materialize();
    for (uint64_t seed = 0; seed < 50; ++seed) {
      const std::vector<StepDraws> draws =
          SampleStepDraws(hp.steps, ds.num_zeros, hp.sampling_rate, target,
                          seed);
      StructuredScript structured(draws);
      ExplicitScript explicit_path(draws, ds.num_zeros);
      absl::StatusOr<DpsgdResult> a =
          RunDpsgdStructured(ds, loss, hp, structured);
      absl::StatusOr<DpsgdResult> b =
          RunDpsgdExplicit(records, Gradient(loss), hp, explicit_path);
      ASSERT_TRUE(a.ok()) << a.status();
      ASSERT_TRUE(b.ok()) << b.status();
      EXPECT_NEAR(a->final_iterate, b->final_iterate, 1e-9);
    }
  }
}

TEST_F(StructuredTest, KolmogorovSmirnovDoesNotReject) {
  const HyperParams hp = Params(0.1, 0.5, 10, 1e5);
  const AdversarialLoss loss = Loss(hp);
  const WorstCaseDataset ds{200, true};
  const std::vector<double> records = ds.Materialize();
  const int n = 10000;
  std::vector<double> structured, explicit_path;
  for (int i = 0; i < n; ++i) {
    structured.push_back(
        RunDpsgdStructured(ds, loss, hp, DeriveSeed(1, i))->final_iterate);
    explicit_path.push_back(
        RunDpsgdExplicit(records, Gradient(loss), hp, DeriveSeed(2, i))
            ->final_iterate);
  }
  // Critical value of the two-sample test at significance 0.01.
  EXPECT_LT(KsStatistic(structured, explicit_path),
            1.628 * std::sqrt(2.0 / n));
}

TEST_F(StructuredTest, ZeroNoiseUpdateReencodesExactly) {
  const double n = 1e6;
  const HyperParams hp = Params(0.1, 0.5, 6, n);
  const AdversarialLoss loss = Loss(hp);
  const EncodingScheme& scheme = loss.scheme();
  // Every step samples exactly N zero records. The target and the noise
  // enter only on the first step, where the target gradient is exactly -1.
  std::vector<StepDraws> draws(6);
  for (size_t k = 0; k < draws.size(); ++k) {
    draws[k].zeros_sampled = static_cast<int64_t>(n);
    draws[k].target_sampled = k == 0;
  }
  draws[0].noise = -0.46;
  StructuredScript script(draws);
  SimulationOptions opts;
  opts.keep_trajectory = true;
  absl::StatusOr<DpsgdResult> r =
      RunDpsgdStructured({static_cast<int64_t>(n), true}, loss, hp, script,
                         opts);
  ASSERT_TRUE(r.ok()) << r.status();
  const std::vector<double>& it = r->trajectory->iterates;
  for (size_t k = 1; k + 1 < it.size(); ++k) {
    const DecodeResult d = Decode(it[k], scheme);
    const double expected =
        d.prefix + *Encode(*StepLogLr(d.residual, 0.1, 0.5), scheme);
    EXPECT_NEAR(it[k + 1], expected, 1e-9) << "step " << k;
  }
}

TEST_F(StructuredTest, RejectsZeroRecordGradientAboveClip) {
  const HyperParams hp = Params(0.1, 0.5, 5, 1);
  const AdversarialLoss loss = Loss(hp);
  absl::StatusOr<DpsgdResult> r =
      RunDpsgdStructured({1000, true}, loss, hp, 4);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST_F(StructuredTest, TenBillionZerosRunsQuickly) {
  const HyperParams hp = Params(0.01, 0.5, 1024, 1e8);
  const AdversarialLoss loss = Loss(hp);
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<DpsgdResult> r =
      RunDpsgdStructured({10'000'000'000, true}, loss, hp, 8);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_LT(seconds, 1.0);
}

TEST_F(StructuredTest, SeedDeterminism) {
  const HyperParams hp = Params(0.01, 0.5, 1024, 1e8);
  const AdversarialLoss loss = Loss(hp);
  const WorstCaseDataset ds{10'000'000'000, true};
  EXPECT_EQ(RunDpsgdStructured(ds, loss, hp, 12)->final_iterate,
            RunDpsgdStructured(ds, loss, hp, 12)->final_iterate);
}

TEST_F(StructuredTest, ContributionsStayWithinClip) {
  const HyperParams hp = Params(0.1, 0.5, 100, 1e9);
  const AdversarialLoss loss = Loss(hp);
  SimulationOptions opts;
  opts.observer = [&](int64_t, double g) {
    EXPECT_LE(std::abs(g), hp.clip_norm);
  };
  ASSERT_TRUE(
      RunDpsgdStructured({10'000'000'000, true}, loss, hp, 5, opts).ok());
}

// Relative batch-size error times the re-encoding jump, per step, over
// residuals drawn from both worlds' per-step distributions. The perturbation
// lands in the next residual, so it must fit in the slack between E/2 and
// the 1 + 5 sigma the residual itself occupies.
TEST(CorruptionBudget, PerturbationFitsDecodingSlack) {
  const int64_t num_zeros = 10'000'000'000;
  const double sigma = 0.5;
  for (double q : {0.1, 0.01}) {
    const double n = q * static_cast<double>(num_zeros);
    const EncodingScheme scheme = *ChooseScheme(sigma);
    const double slack = scheme.base() / 2 - (1 + 5 * sigma);
    RandomDraws draws(DeriveSeed(99, static_cast<uint64_t>(q * 1000)));
    double worst = 0;
    for (int i = 0; i < 100000; ++i) {
      const double b = draws.Binomial(num_zeros, q);
      const double v = (i % 2) + sigma * draws.StandardNormal();
      const double jump =
          std::abs(v - *Encode(*StepLogLr(v, q, sigma), scheme));
      worst = std::max(worst, std::abs(b / n - 1) * jump);
    }
    RecordProperty(q == 0.1 ? "worst_q0.1" : "worst_q0.01",
                   std::to_string(worst));
    EXPECT_LT(worst, slack) << "q=" << q;
  }
}

}  // namespace
}  // namespace hsaudit
