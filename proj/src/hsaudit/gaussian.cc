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

#include "boost/math/special_functions/erf.hpp"

namespace hsaudit {

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double NormalSurvival(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double NormalQuantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double NormalIntervalMass(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return NormalSurvival(lo) - NormalSurvival(hi);
  if (hi <= 0.0) return NormalCdf(hi) - NormalCdf(lo);
  return 1.0 - NormalCdf(lo) - NormalSurvival(hi);
}

double GaussianMechanismDelta(double epsilon, double sigma) {
  const double a = 1.0 / (2.0 * sigma);
  const double b = epsilon * sigma;
  const double value =
      NormalCdf(a - b) - std::exp(epsilon) * NormalCdf(-a - b);
  return value > 0.0 ? value : 0.0;
}

double GaussianTradeoff(double alpha, double mu) {
  if (alpha <= 0.0) return 1.0;
  if (alpha >= 1.0) return 0.0;
  return NormalCdf(-NormalQuantile(alpha) - mu);
}

}  // namespace hsaudit
