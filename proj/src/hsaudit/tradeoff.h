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

// Trade-off functions: the smallest false negative rate beta achievable at
// false positive rate alpha when telling two output distributions apart.

#ifndef HSAUDIT_TRADEOFF_H_
#define HSAUDIT_TRADEOFF_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "absl/status/statusor.h"
#include "hsaudit/privacy_loss_distribution.h"

namespace hsaudit {

struct CurvePoint {
  double alpha;
  double beta;
};

// An evaluable alpha -> beta map. Cheap to copy; the backing data is shared.
class TradeoffCurve {
 public:
  explicit TradeoffCurve(std::function<double(double)> beta_of_alpha)
      : beta_of_alpha_(std::make_shared<const std::function<double(double)>>(
            std::move(beta_of_alpha))) {}

  // alpha is clamped to [0, 1].
  double operator()(double alpha) const;

  std::vector<CurvePoint> Sample(const std::vector<double>& alphas) const;

 private:
  std::shared_ptr<const std::function<double(double)>> beta_of_alpha_;
};

// `points` values in [0, 1]: a uniform grid merged with a log-spaced grid
// down to 1e-6, so steep regions near alpha = 0 are resolved.
std::vector<double> PlotAlphaGrid(size_t points = 1001);

// Signed epsilon grid used to turn a privacy profile into a curve.
struct EpsilonSweep {
  double min = -20.0;
  double max = 20.0;
  double step = 0.01;

  std::vector<double> Values() const;
};

// beta(alpha) = sup over eps of max(0, 1 - delta(eps) - e^eps alpha,
// e^-eps (1 - delta(eps) - alpha)), where delta is the worst of the two
// adjacency directions. The result is symmetric in the two neighbours.
TradeoffCurve TradeoffFromProfile(const std::function<double(double)>& delta,
                                  const EpsilonSweep& sweep = {});
TradeoffCurve TradeoffFromProfile(const PrivacyProfile& profile,
                                  const EpsilonSweep& sweep = {});

// N(0, 1) vs N(mu, 1).
TradeoffCurve GaussianTradeoffCurve(double mu);

// Final iterate of DP-SGD with a linear loss: N(0, T s^2) against
// sum_k Binom(T, q)(k) N(k, T s^2), symmetrised as the convex envelope of
// the pointwise minimum of the curve and its inverse. The envelope is
// located on a 4001-point grid and is linear across the crossings.
absl::StatusOr<TradeoffCurve> MogTradeoff(double noise_multiplier,
                                          double sampling_rate,
                                          int64_t steps);

}  // namespace hsaudit

#endif  // HSAUDIT_TRADEOFF_H_
