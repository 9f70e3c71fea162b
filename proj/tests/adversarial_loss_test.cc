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
#include <limits>
#include <random>

#include "absl/status/status.h"
#include "gtest/gtest.h"

namespace hsaudit {
namespace {

// Reference values from a 50-digit evaluation of
// ln(q * exp((2v - 1) / (2 sigma^2)) + 1 - q).
struct LlrCase {
  double v;
  double q;
  double sigma;
  double expected;
};

class StepLogLrTest : public ::testing::TestWithParam<LlrCase> {};

TEST_P(StepLogLrTest, MatchesHighPrecisionReference) {
  const LlrCase& c = GetParam();
  absl::StatusOr<double> l = StepLogLr(c.v, c.q, c.sigma);
  ASSERT_TRUE(l.ok()) << l.status();
  EXPECT_NEAR(*l, c.expected, 1e-12 * std::max(1.0, std::abs(c.expected)));
}

INSTANTIATE_TEST_SUITE_P(
    References, StepLogLrTest,
    ::testing::Values(LlrCase{0.0, 0.1, 0.5, -0.090435200691849216},
                      LlrCase{0.73, 0.1, 0.5, 0.14056947622637428},
                      LlrCase{3.2, 0.1, 1.387, 0.26768832199289690},
                      LlrCase{-40.0, 0.01, 0.5, -0.010050335853501441},
                      LlrCase{40.0, 0.01, 0.5, 153.39482981401191},
                      LlrCase{1e6, 0.1, 0.5, 3999995.6974149070}));

TEST(StepLogLr, MidpointGivesZero) {
  for (double q : {0.01, 0.3, 1.0}) {
    for (double sigma : {0.5, 2.0}) {
      EXPECT_NEAR(*StepLogLr(0.5, q, sigma), 0.0, 1e-15);
    }
  }
}

TEST(StepLogLr, NoSamplingGivesZero) {
  EXPECT_EQ(*StepLogLr(3.0, 0.0, 0.5), 0.0);
}

TEST(StepLogLr, FullSamplingIsGaussianRatio) {
  const double v = 2.3, sigma = 0.7;
  EXPECT_NEAR(*StepLogLr(v, 1.0, sigma), (2 * v - 1) / (2 * sigma * sigma),
              1e-12);
}

TEST(StepLogLr, RejectsBadArguments) {
  EXPECT_FALSE(StepLogLr(std::numeric_limits<double>::infinity(), 0.1, 1).ok());
  EXPECT_FALSE(StepLogLr(std::nan(""), 0.1, 1).ok());
  EXPECT_FALSE(StepLogLr(0.0, 1.5, 1).ok());
  EXPECT_FALSE(StepLogLr(0.0, 0.1, 0).ok());
}

TEST(StepLogLr, AgreesWithNaiveFormWhereItIsFinite) {
  for (double q : {0.01, 0.1, 0.5, 0.9}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double v = -20.0; v <= 20.0; v += 0.037) {
        const long double x = (2.0L * v - 1.0L) / (2.0L * sigma * sigma);
        const long double naive = std::log(q * std::exp(x) + 1.0L - q);
        const double l = *StepLogLr(v, q, sigma);
        EXPECT_NEAR(l, static_cast<double>(naive),
                    1e-12 * std::abs(static_cast<double>(naive)) + 1e-15)
            << "v=" << v << " q=" << q << " sigma=" << sigma;
      }
    }
  }
}

TEST(StepLogLr, FiniteUpToEncodableRange) {
  for (double v : {-1e6, -1e3, 1e3, 1e6}) {
    for (double sigma : {0.05, 0.5, 5.0}) {
      absl::StatusOr<double> l = StepLogLr(v, 0.1, sigma);
      ASSERT_TRUE(l.ok());
      EXPECT_TRUE(std::isfinite(*l)) << v << " " << sigma;
    }
  }
}

TEST(StepLogLr, MonotoneBoundedBelowWithBoundedSlope) {
  for (double q : {0.01, 0.1, 0.7}) {
    for (double sigma : {0.3, 1.0, 3.0}) {
      const double floor = std::log1p(-q);
      const double max_slope = 1.0 / (sigma * sigma);
      double prev = *StepLogLr(-50.0, q, sigma);
      for (double v = -50.0 + 0.01; v <= 50.0; v += 0.01) {
        const double l = *StepLogLr(v, q, sigma);
        EXPECT_GE(l, floor);
        EXPECT_GE(l, prev);
        if (prev - floor > 1e-12) EXPECT_GT(l, prev) << v;
        EXPECT_LE(l - prev, max_slope * 0.01 * (1 + 1e-9) + 1e-12);
        prev = l;
      }
    }
  }
}

TEST(EncodingScheme, RejectsNonPowersOfTen) {
  EXPECT_TRUE(EncodingScheme::Create(1000).ok());
  EXPECT_TRUE(EncodingScheme::Create(1).ok());
  EXPECT_FALSE(EncodingScheme::Create(0).ok());
  EXPECT_FALSE(EncodingScheme::Create(50).ok());
  EXPECT_FALSE(EncodingScheme::Create(-10).ok());
}

TEST(ChooseScheme, SmallestPowerOfTenCoveringFiveSigma) {
  EXPECT_EQ(ChooseScheme(0.05)->base(), 10);
  EXPECT_EQ(ChooseScheme(0.5)->base(), 10);
  EXPECT_EQ(ChooseScheme(0.8)->base(), 10);
  EXPECT_EQ(ChooseScheme(0.81)->base(), 100);
  EXPECT_EQ(ChooseScheme(1.387)->base(), 100);
  EXPECT_EQ(ChooseScheme(10.0)->base(), 1000);
  EXPECT_FALSE(ChooseScheme(0.0).ok());
}

TEST(ChooseScheme, HalfBaseCoversNoiseForManySigmas) {
  for (double sigma = 0.01; sigma < 500; sigma *= 1.37) {
    const double e = ChooseScheme(sigma)->base();
    EXPECT_GE(e / 2, 1 + 5 * sigma);
    EXPECT_LT(e / 20, 1 + 5 * sigma) << sigma;
  }
}

TEST(Encode, Examples) {
  const EncodingScheme ten = *EncodingScheme::Create(10);
  const EncodingScheme hundred = *EncodingScheme::Create(100);
  EXPECT_EQ(*Encode(0.0, ten), 0.0);
  EXPECT_EQ(*Encode(-0.090443, ten), -90.0);
  EXPECT_EQ(*Encode(0.14055, hundred), 1400.0);
  EXPECT_EQ(*Encode(0.125, ten), 130.0);
  EXPECT_EQ(*Encode(-0.125, ten), -130.0);
}

TEST(Encode, RejectsOutOfRange) {
  const EncodingScheme ten = *EncodingScheme::Create(10);
  EXPECT_EQ(Encode(1e6 + 1, ten).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(Encode(-1e6 - 1, ten).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_TRUE(Encode(1e6, ten).ok());
}

TEST(Encode, ImageIsMultipleOfBase) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> llr(-1e4, 1e4);
  for (double base : {10.0, 100.0, 1000.0}) {
    const EncodingScheme scheme = *EncodingScheme::Create(base);
    for (int i = 0; i < 2000; ++i) {
      const double e = *Encode(llr(rng), scheme);
      EXPECT_EQ(std::fmod(e, base), 0.0) << e;
    }
  }
}

TEST(Decode, Examples) {
  const EncodingScheme ten = *EncodingScheme::Create(10);
  const EncodingScheme hundred = *EncodingScheme::Create(100);
  DecodeResult d = Decode(0.0, ten);
  EXPECT_EQ(d.prefix, 0.0);
  EXPECT_EQ(d.residual, 0.0);
  d = Decode(-89.27, ten);
  EXPECT_EQ(d.prefix, -90.0);
  EXPECT_NEAR(d.residual, 0.73, 1e-12);
  d = Decode(1403.2, hundred);
  EXPECT_EQ(d.prefix, 1400.0);
  EXPECT_NEAR(d.residual, 3.2, 1e-12);
}

TEST(Decode, TiesGoToEvenMultiple) {
  const EncodingScheme ten = *EncodingScheme::Create(10);
  EXPECT_EQ(Decode(15.0, ten).prefix, 20.0);
  EXPECT_EQ(Decode(25.0, ten).prefix, 20.0);
  EXPECT_EQ(Decode(-15.0, ten).prefix, -20.0);
}

TEST(Decode, RoundTripsPrefixAndResidual) {
  std::mt19937_64 rng(11);
  for (double base : {10.0, 100.0, 1000.0}) {
    const EncodingScheme scheme = *EncodingScheme::Create(base);
    const double max_k = std::ldexp(1.0, 40) / base - 1;
    std::uniform_real_distribution<double> k_dist(-max_k, max_k);
    std::uniform_real_distribution<double> v_dist(-base / 2, base / 2);
    for (int i = 0; i < 5000; ++i) {
      const double prefix = std::trunc(k_dist(rng)) * base;
      double v = v_dist(rng);
      if (std::abs(v) >= base / 2) continue;
      const double theta = prefix + v;
      const DecodeResult d = Decode(theta, scheme);
      // theta itself is v rounded to the spacing of doubles near prefix.
      EXPECT_EQ(d.prefix, prefix) << theta;
      EXPECT_EQ(d.prefix + d.residual, theta);
      EXPECT_LE(std::abs(d.residual - v), std::abs(theta) * 0x1p-52);
    }
  }
}

TEST(Decode, DyadicResidualsRoundTripExactly) {
  const EncodingScheme ten = *EncodingScheme::Create(10);
  for (double k : {-1e9, -3.0, 0.0, 7.0, 1e10}) {
    for (double v : {-4.75, -0.5, 0.0, 0.125, 4.9375}) {
      const DecodeResult d = Decode(k * 10 + v, ten);
      EXPECT_EQ(d.prefix, k * 10);
      EXPECT_EQ(d.residual, v);
    }
  }
}

class AdversarialLossTest : public ::testing::Test {
 protected:
  AdversarialLoss Make(double base, double q, double sigma, double n) {
    return *AdversarialLoss::Create(*EncodingScheme::Create(base), q, sigma,
                                    n);
  }
};

TEST_F(AdversarialLossTest, FirstStepGradientIsNegatedRecord) {
  const AdversarialLoss loss = Make(10, 0.1, 0.5, 1e9);
  EXPECT_EQ(*loss.Gradient(0.0, 0.0), 0.0);
  EXPECT_EQ(*loss.Gradient(1.0, 0.0), -1.0);
}

TEST_F(AdversarialLossTest, LaterStepGradientCarriesReencoding) {
  const AdversarialLoss loss = Make(10, 0.1, 0.5, 1e9);
  const double v = -89.27 + 90.0;
  const double encoded = *Encode(*StepLogLr(v, 0.1, 0.5),
                                 *EncodingScheme::Create(10));
  EXPECT_EQ(encoded, 140.0);
  const double shared = (v - encoded) / 1e9;
  EXPECT_NEAR(*loss.Gradient(0.0, -89.27), shared, 1e-18);
  EXPECT_NEAR(*loss.Gradient(1.0, -89.27), shared - 1.0, 1e-15);
}

TEST_F(AdversarialLossTest, FailsWhenSharedPartReachesClipNorm) {
  const AdversarialLoss loss = Make(10, 0.1, 0.5, 1.0);
  EXPECT_EQ(loss.Gradient(0.0, -89.27).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST_F(AdversarialLossTest, FreeFunctionMatchesClass) {
  const EncodingScheme scheme = *EncodingScheme::Create(100);
  const AdversarialLoss loss = Make(100, 0.05, 1.387, 5e8);
  for (double theta : {0.0, 3.1, -1203.7, 55555.2}) {
    for (double x : {0.0, 1.0}) {
      EXPECT_EQ(*loss.Gradient(x, theta),
                *AdversarialGradient(x, theta, scheme, 0.05, 1.387, 5e8));
    }
    EXPECT_EQ(*loss.ExtractLlrSum(theta),
              *ExtractLlrSum(theta, scheme, 0.05, 1.387));
  }
}

TEST_F(AdversarialLossTest, ExtractionExamples) {
  const AdversarialLoss loss = Make(10, 0.1, 0.5, 1e9);
  EXPECT_NEAR(*loss.ExtractLlrSum(0.0), -0.09, 1e-15);
  EXPECT_NEAR(*loss.ExtractLlrSum(-89.27), 0.05, 1e-15);
  for (double k : {-7.0, 0.0, 3.0, 250.0}) {
    EXPECT_NEAR(*loss.ExtractLlrSum(k * 1000 + 0.5), k, 1e-12);
  }
}

TEST_F(AdversarialLossTest, ExtractionMatchesZeroRecordUpdate) {
  const double n = 1e9;
  const AdversarialLoss loss = Make(10, 0.1, 0.5, n);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double theta = dist(rng);
    absl::StatusOr<double> g = loss.Gradient(0.0, theta);
    if (!g.ok()) continue;
    EXPECT_NEAR(*loss.ExtractLlrSum(theta), (theta - n * *g) / 1000.0, 1e-9);
  }
}

TEST_F(AdversarialLossTest, ForHyperParamsRequiresUnitStepAndClip) {
  HyperParams hp;
  hp.noise_multiplier = 0.5;
  hp.sampling_rate = 0.1;
  hp.steps = 10;
  hp.expected_batch = 1e6;
  absl::StatusOr<AdversarialLoss> loss = AdversarialLoss::ForHyperParams(hp);
  ASSERT_TRUE(loss.ok());
  EXPECT_EQ(loss->scheme().base(), 10);
  hp.learning_rate = 0.5;
  EXPECT_FALSE(AdversarialLoss::ForHyperParams(hp).ok());
  hp.learning_rate = 1;
  hp.clip_norm = 2;
  EXPECT_FALSE(AdversarialLoss::ForHyperParams(hp).ok());
}

}  // namespace
}  // namespace hsaudit
