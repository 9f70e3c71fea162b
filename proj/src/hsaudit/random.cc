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

#include "hsaudit/random.h"

#include <algorithm>
#include <cmath>

namespace hsaudit {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t parent, uint64_t index) {
  return SplitMix64(SplitMix64(parent) ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

bool RandomDraws::Bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform_(engine_) < p;
}

int64_t RandomDraws::Binomial(int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double mean = static_cast<double>(n) * p;
  const double variance = mean * (1.0 - p);
  if (variance <= kExactBinomialVarianceLimit) {
    if (!binomial_.has_value() || binomial_->t() != n || binomial_->p() != p) {
      binomial_.emplace(n, p);
    }
    return (*binomial_)(engine_);
  }
  const double draw = std::floor(mean + std::sqrt(variance) * normal_(engine_) + 0.5);
  return static_cast<int64_t>(std::clamp(draw, 0.0, static_cast<double>(n)));
}

}  // namespace hsaudit
