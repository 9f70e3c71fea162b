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

#ifndef HSAUDIT_RANDOM_H_
#define HSAUDIT_RANDOM_H_

#include <cstdint>
#include <optional>
#include <random>

namespace hsaudit {

// Derives the seed of child stream `index` from `parent`. Distinct indices
// give statistically independent streams; the mapping is a SplitMix64
// finalizer over parent and index and is stable across platforms.
uint64_t DeriveSeed(uint64_t parent, uint64_t index);

// Primitive random draws consumed by the DP-SGD simulators. Tests substitute
// scripted sources to drive the explicit and structured paths off one stream.
class DrawSource {
 public:
  virtual ~DrawSource() = default;

  // Returns true with probability p. Draws nothing when p <= 0 or p >= 1.
  virtual bool Bernoulli(double p) = 0;

  // Number of successes in n independent Bernoulli(p) trials. Draws nothing
  // when the outcome is deterministic (n == 0, p <= 0 or p >= 1).
  virtual int64_t Binomial(int64_t n, double p) = 0;

  virtual double StandardNormal() = 0;
};

// Variance n*p*(1-p) above which Binomial() switches from exact sampling to a
// continuity-corrected normal approximation.
inline constexpr double kExactBinomialVarianceLimit = 1e4;

// Pseudo-random draws from a seeded 64-bit Mersenne twister.
class RandomDraws final : public DrawSource {
 public:
  explicit RandomDraws(uint64_t seed) : engine_(seed) {}

  bool Bernoulli(double p) override;
  int64_t Binomial(int64_t n, double p) override;
  double StandardNormal() override { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  std::optional<std::binomial_distribution<int64_t>> binomial_;
};

}  // namespace hsaudit

#endif  // HSAUDIT_RANDOM_H_
