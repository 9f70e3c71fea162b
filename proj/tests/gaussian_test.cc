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

#include "hsaudit/gaussian.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace hsaudit {
namespace {

// Reference values from 40-digit evaluations.
TEST(NormalCdf, References) {
  EXPECT_NEAR(NormalCdf(-1.0), 0.15865525393145705, 1e-16);
  EXPECT_NEAR(NormalCdf(1.96), 0.97500210485177957, 1e-16);
  EXPECT_EQ(NormalCdf(0.0), 0.5);
}

TEST(NormalSurvival, AccurateInUpperTail) {
  EXPECT_NEAR(NormalSurvival(10.0) / 7.6198530241605261e-24, 1.0, 1e-13);
  EXPECT_NEAR(NormalSurvival(-3.0), 0.99865010196836991, 1e-16);
}

TEST(NormalQuantile, References) {
  EXPECT_NEAR(NormalQuantile(0.975), 1.9599639845400542, 1e-14);
  EXPECT_NEAR(NormalQuantile(1e-10), -6.3613409024040562, 1e-12);
  EXPECT_EQ(NormalQuantile(0.5), 0.0);
  EXPECT_EQ(NormalQuantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(NormalQuantile(1.0), std::numeric_limits<double>::infinity());
}

TEST(NormalQuantile, InvertsCdf) {
  for (double x = -8; x <= 1; x += 0.25) {
    EXPECT_NEAR(NormalQuantile(NormalCdf(x)), x, 1e-9 * (1 + std::abs(x)));
  }
}

TEST(NormalIntervalMass, NoCancellationInTails) {
  EXPECT_NEAR(NormalIntervalMass(8, 9) / 6.2198319858658303e-16, 1.0, 1e-12);
  EXPECT_NEAR(NormalIntervalMass(-9, -8) / 6.2198319858658303e-16, 1.0,
              1e-12);
  EXPECT_NEAR(NormalIntervalMass(-1, 1), 1 - 2 * 0.15865525393145705, 1e-15);
  EXPECT_EQ(NormalIntervalMass(2, 2), 0.0);
}

TEST(GaussianMechanismDelta, References) {
  EXPECT_NEAR(GaussianMechanismDelta(1.0, 1.0), 0.12693673750664395, 1e-15);
  EXPECT_NEAR(GaussianMechanismDelta(3.0, 0.5), 0.18381307654447216, 1e-15);
}

TEST(GaussianMechanismDelta, DecreasesInEpsilon) {
  double prev = 1.0;
  for (double eps = 0; eps <= 10; eps += 0.1) {
    const double d = GaussianMechanismDelta(eps, 0.8);
    EXPECT_LE(d, prev);
    EXPECT_GE(d, 0.0);
    prev = d;
  }
}

TEST(GaussianTradeoff, References) {
  EXPECT_NEAR(GaussianTradeoff(0.05, 1.0), 0.74048897715855593, 1e-14);
  EXPECT_NEAR(GaussianTradeoff(0.3, 0.0), 0.7, 1e-15);
  EXPECT_EQ(GaussianTradeoff(1.0, 2.0), 0.0);
  EXPECT_EQ(GaussianTradeoff(0.0, 2.0), 1.0);
}

}  // namespace
}  // namespace hsaudit
