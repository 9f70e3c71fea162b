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

#include "hsaudit/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "hsaudit/gaussian.h"

namespace hsaudit {
namespace {

// Binomial terms lighter than this are dropped from the mixture.
constexpr double kMixtureWeightCutoff = 1e-12;

// Samples used to locate the convex envelope of a symmetrised curve.
constexpr size_t kEnvelopeGridPoints = 4001;

struct ShiftedMixture {
  double scale;  // common standard deviation
  std::vector<double> shifts;
  std::vector<double> weights;

  // Q(X < tau).
  double Cdf(double tau) const {
    double total = 0.0;
    for (size_t k = 0; k < shifts.size(); ++k) {
      total += weights[k] * NormalCdf((tau - shifts[k]) / scale);
    }
    return total;
  }

  // FNR of the test rejecting the null N(0, scale^2) when x >= tau.
  double BetaAt(double alpha) const {
    if (alpha <= 0.0) return 1.0;
    if (alpha >= 1.0) return 0.0;
    return Cdf(-scale * NormalQuantile(alpha));
  }

  // alpha' with BetaAt(alpha') = beta.
  double InverseAt(double beta) const {
    if (beta <= 0.0) return 1.0;
    if (beta >= 1.0) return 0.0;
    double lo = shifts.front() - 40.0 * scale;
    double hi = shifts.back() + 40.0 * scale;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi));
         ++i) {
      const double mid = 0.5 * (lo + hi);
      if (Cdf(mid) < beta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return NormalSurvival(0.5 * (lo + hi) / scale);
  }
};

// Segment on which the lower convex envelope of a curve lies strictly
// below the curve.
struct Bridge {
  double alpha0, beta0;
  double alpha1, beta1;
};

// Bridges of the lower convex envelope of `f` sampled on `alphas`. Chords
// that rise above f by less than `tolerance` are ignored.
std::vector<Bridge> ConvexBridges(const std::function<double(double)>& f,
                                  const std::vector<double>& alphas,
                                  double tolerance) {
  std::vector<double> betas(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) betas[i] = f(alphas[i]);
  // Andrew's monotone chain, lower hull only.
  std::vector<size_t> hull;
  for (size_t i = 0; i < alphas.size(); ++i) {
    while (hull.size() >= 2) {
      const size_t a = hull[hull.size() - 2];
      const size_t b = hull.back();
      const double cross = (alphas[b] - alphas[a]) * (betas[i] - betas[a]) -
                           (betas[b] - betas[a]) * (alphas[i] - alphas[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<Bridge> bridges;
  for (size_t h = 1; h < hull.size(); ++h) {
    const size_t a = hull[h - 1];
    const size_t b = hull[h];
    if (b == a + 1) continue;
    const double slope = (betas[b] - betas[a]) / (alphas[b] - alphas[a]);
    double gap = 0.0;
    for (size_t i = a + 1; i < b; ++i) {
      gap = std::max(gap, betas[i] - (betas[a] + slope * (alphas[i] - alphas[a])));
    }
    if (gap > tolerance) {
      bridges.push_back({alphas[a], betas[a], alphas[b], betas[b]});
    }
  }
  return bridges;
}

}  // namespace

double TradeoffCurve::operator()(double alpha) const {
  return (*beta_of_alpha_)(std::clamp(alpha, 0.0, 1.0));
}

std::vector<CurvePoint> TradeoffCurve::Sample(
    const std::vector<double>& alphas) const {
  std::vector<CurvePoint> points;
  points.reserve(alphas.size());
  for (double a : alphas) points.push_back({a, (*this)(a)});
  return points;
}

std::vector<double> PlotAlphaGrid(size_t points) {
  points = std::max<size_t>(points, 4);
  const size_t log_points = points / 4;
  const size_t uniform_points = points - log_points;
  std::vector<double> grid;
  grid.reserve(points);
  for (size_t i = 0; i < uniform_points; ++i) {
    grid.push_back(static_cast<double>(i) /
                   static_cast<double>(uniform_points - 1));
  }
  const double step = 1.0 / static_cast<double>(uniform_points - 1);
  const double lo = std::log(1e-6);
  const double hi = std::log(step);
  for (size_t i = 0; i < log_points; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(log_points)));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> EpsilonSweep::Values() const {
  std::vector<double> values;
  const int64_t count =
      static_cast<int64_t>(std::floor((max - min) / step + 1e-9)) + 1;
  values.reserve(static_cast<size_t>(std::max<int64_t>(count, 0)));
  for (int64_t i = 0; i < count; ++i) {
    values.push_back(min + static_cast<double>(i) * step);
  }
  return values;
}

TradeoffCurve TradeoffFromProfile(const std::function<double(double)>& delta,
                                  const EpsilonSweep& sweep) {
  struct Line {
    double exp_eps;
    double exp_neg_eps;
    double one_minus_delta;
  };
  std::vector<Line> lines;
  for (double eps : sweep.Values()) {
    lines.push_back({std::exp(eps), std::exp(-eps), 1.0 - delta(eps)});
  }
  return TradeoffCurve([lines = std::move(lines)](double alpha) {
    double beta = 0.0;
    for (const Line& l : lines) {
      const double first = l.one_minus_delta - l.exp_eps * alpha;
      const double second = l.exp_neg_eps * (l.one_minus_delta - alpha);
      beta = std::max(beta, std::max(first, second));
    }
    return std::min(beta, 1.0 - alpha);
  });
}

TradeoffCurve TradeoffFromProfile(const PrivacyProfile& profile,
                                  const EpsilonSweep& sweep) {
  return TradeoffFromProfile(
      [&profile](double eps) { return profile.WorstDelta(eps); }, sweep);
}

TradeoffCurve GaussianTradeoffCurve(double mu) {
  return TradeoffCurve([mu](double alpha) { return GaussianTradeoff(alpha, mu); });
}

absl::StatusOr<TradeoffCurve> MogTradeoff(double noise_multiplier,
                                          double sampling_rate,
                                          int64_t steps) {
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError("noise_multiplier must be positive.");
  }
  if (!(sampling_rate >= 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError("sampling_rate must lie in [0, 1].");
  }
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("steps must be >= 1, got ", steps, "."));
  }
  ShiftedMixture mixture;
  mixture.scale = noise_multiplier * std::sqrt(static_cast<double>(steps));
  const double q = sampling_rate;
  if (q == 0.0 || q == 1.0) {
    mixture.shifts = {q == 0.0 ? 0.0 : static_cast<double>(steps)};
    mixture.weights = {1.0};
  } else {
    const double n = static_cast<double>(steps);
    for (int64_t k = 0; k <= steps; ++k) {
      const double kk = static_cast<double>(k);
      const double log_weight = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) -
                                std::lgamma(n - kk + 1.0) + kk * std::log(q) +
                                (n - kk) * std::log1p(-q);
      const double weight = std::exp(log_weight);
      if (weight < kMixtureWeightCutoff) continue;
      mixture.shifts.push_back(kk);
      mixture.weights.push_back(weight);
    }
  }
  // The pointwise minimum of a curve and its inverse has kinks where the
  // two cross; the symmetric trade-off function is its convex envelope.
  auto symmetric = [mixture = std::move(mixture)](double alpha) {
    return std::min(mixture.BetaAt(alpha), mixture.InverseAt(alpha));
  };
  std::vector<Bridge> bridges =
      ConvexBridges(symmetric, PlotAlphaGrid(kEnvelopeGridPoints), 1e-12);
  return TradeoffCurve([symmetric = std::move(symmetric),
                        bridges = std::move(bridges)](double alpha) {
    for (const Bridge& b : bridges) {
      if (alpha > b.alpha0 && alpha < b.alpha1) {
        const double t = (alpha - b.alpha0) / (b.alpha1 - b.alpha0);
        return b.beta0 + t * (b.beta1 - b.beta0);
      }
    }
    return symmetric(alpha);
  });
}

}  // namespace hsaudit
