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

#include "hsaudit/privacy_loss_distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "hsaudit/fft_convolution.h"
#include "hsaudit/gaussian.h"

namespace hsaudit {
namespace {

constexpr size_t kMaxSingleStepGridSize = size_t{1} << 26;

// ln(mu1(x) / mu0(x)).
double MixtureLogRatio(double x, double q, double sigma) {
  const double exponent = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  if (q == 1.0) return exponent;
  if (exponent > 0.0) {
    return exponent + std::log(q) +
           std::log1p((1.0 - q) / q * std::exp(-exponent));
  }
  return std::log1p(q * std::expm1(exponent));
}

// Inverse of MixtureLogRatio in x, for loss > ln(1 - q).
double MixtureLogRatioInverse(double loss, double q, double sigma) {
  const double ratio = std::expm1(loss) / q;
  if (ratio <= -1.0) return -HUGE_VAL;
  return sigma * sigma * std::log1p(ratio) + 0.5;
}

struct GaussianComponent {
  double weight;
  double mean;
};

// Probability mass of consecutive cells (xs[j], xs[j+1]] under a Gaussian
// mixture, evaluated per edge so each cdf is computed once.
std::vector<double> CellMasses(const std::vector<double>& xs, double sigma,
                               std::span<const GaussianComponent> mixture) {
  std::vector<double> cells(xs.size() - 1, 0.0);
  std::vector<double> tail(xs.size());
  for (const GaussianComponent& c : mixture) {
    if (c.weight == 0.0) continue;
    for (size_t j = 0; j < xs.size(); ++j) {
      const double u = (xs[j] - c.mean) / sigma;
      tail[j] = u < 0.0 ? NormalCdf(u) : NormalSurvival(u);
    }
    for (size_t j = 0; j + 1 < xs.size(); ++j) {
      const double ua = (xs[j] - c.mean) / sigma;
      const double ub = (xs[j + 1] - c.mean) / sigma;
      double mass;
      if (ua >= 0.0) {
        mass = tail[j] - tail[j + 1];
      } else if (ub < 0.0) {
        mass = tail[j + 1] - tail[j];
      } else {
        mass = 1.0 - tail[j] - tail[j + 1];
      }
      cells[j] += c.weight * std::max(mass, 0.0);
    }
  }
  return cells;
}

// Drops up to `budget` of mass from each end of `masses`, returning the
// number of entries removed from the front and the mass removed overall.
std::pair<size_t, double> TruncateTails(std::vector<double>& masses,
                                        double budget) {
  size_t front = 0;
  double dropped_front = 0.0;
  while (front + 1 < masses.size() &&
         dropped_front + masses[front] <= budget) {
    dropped_front += masses[front];
    ++front;
  }
  size_t back = masses.size();
  double dropped_back = 0.0;
  while (back > front + 1 && dropped_back + masses[back - 1] <= budget) {
    dropped_back += masses[back - 1];
    --back;
  }
  masses.erase(masses.begin() + back, masses.end());
  masses.erase(masses.begin(), masses.begin() + front);
  return {front, dropped_front + dropped_back};
}

// Tail mass allowed outside the window of a self-composition; it wraps
// around the circular transform, so it must sit far below rounding noise.
constexpr double kWindowTailMass = 1e-30;

// Positive entries of a mass vector as (index, log mass) pairs.
struct LogMasses {
  std::vector<double> index;
  std::vector<double> log_mass;
};

LogMasses ToLogMasses(std::span<const double> masses, bool reversed) {
  LogMasses out;
  const size_t n = masses.size();
  for (size_t i = 0; i < n; ++i) {
    const double m = masses[reversed ? n - 1 - i : i];
    if (m > 0.0) {
      out.index.push_back(static_cast<double>(i));
      out.log_mass.push_back(std::log(m));
    }
  }
  return out;
}

// log sum_i masses[i] exp(lambda * i).
double LogMoment(const LogMasses& m, double lambda) {
  double peak = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < m.index.size(); ++k) {
    peak = std::max(peak, m.log_mass[k] + lambda * m.index[k]);
  }
  double sum = 0.0;
  for (size_t k = 0; k < m.index.size(); ++k) {
    sum += std::exp(m.log_mass[k] + lambda * m.index[k] - peak);
  }
  return peak + std::log(sum);
}

// Range [lower, upper] of the times-fold sum of indices drawn from `masses`
// leaving at most `tail` outside on each side, by the Chernoff bound
// minimized over exponents around the Gaussian optimum.
std::pair<int64_t, int64_t> SumSupportBounds(std::span<const double> masses,
                                             int64_t times, double tail) {
  const double t = static_cast<double>(times);
  const double full = t * static_cast<double>(masses.size() - 1);
  const double log_tail = std::log(tail);
  double total = 0.0;
  double mean = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    total += masses[i];
    mean += masses[i] * static_cast<double>(i);
  }
  mean /= total;
  double variance = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    variance += masses[i] * std::pow(static_cast<double>(i) - mean, 2);
  }
  variance = std::max(variance / total, 1e-6);
  const double center = std::sqrt(-2.0 * log_tail / (t * variance));
  // Distance from the top of the full support that leaves `tail` above.
  auto minimize = [&](const LogMasses& m) {
    auto bound = [&](double lambda) {
      return (t * LogMoment(m, lambda) - log_tail) / lambda;
    };
    double best = full;
    double best_lambda = center;
    for (double lambda = center / 64.0; lambda <= center * 64.0;
         lambda *= 2.0) {
      const double value = bound(lambda);
      if (value < best) {
        best = value;
        best_lambda = lambda;
      }
    }
    for (double lambda = best_lambda / 2.0; lambda <= best_lambda * 2.0;
         lambda *= 1.1) {
      best = std::min(best, bound(lambda));
    }
    return std::clamp(best, 0.0, full);
  };
  const double upper = minimize(ToLogMasses(masses, false));
  const double lower = full - minimize(ToLogMasses(masses, true));
  return {static_cast<int64_t>(std::floor(std::min(lower, upper))),
          static_cast<int64_t>(std::ceil(std::max(lower, upper)))};
}

}  // namespace

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::Create(
    double grid_spacing, int64_t lower_index, std::vector<double> masses,
    double infinity_mass) {
  if (!(grid_spacing > 0.0) || !std::isfinite(grid_spacing)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid_spacing must be positive, got ", grid_spacing, "."));
  }
  if (!(infinity_mass >= 0.0 && infinity_mass <= 1.0)) {
    return absl::InvalidArgumentError("infinity_mass must lie in [0, 1].");
  }
  double total = infinity_mass;
  for (double m : masses) {
    if (!(m >= 0.0)) {
      return absl::InvalidArgumentError("masses must be non-negative.");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("masses and infinity_mass sum to ", total, ", not 1."));
  }
  if (masses.empty()) {
    masses.push_back(0.0);
  }
  return PrivacyLossDistribution(grid_spacing, lower_index, std::move(masses),
                                 infinity_mass);
}

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::Identity(
    double grid_spacing) {
  return Create(grid_spacing, 0, {1.0}, 0.0);
}

absl::StatusOr<PrivacyLossDistribution>
PrivacyLossDistribution::SubsampledGaussian(double sampling_rate,
                                            double noise_multiplier,
                                            double grid_spacing,
                                            AdjacencyDirection direction,
                                            double truncation_mass) {
  if (!(grid_spacing > 0.0) || !std::isfinite(grid_spacing)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid_spacing must be positive, got ", grid_spacing, "."));
  }
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sampling_rate must lie in (0, 1], got ", sampling_rate, "."));
  }
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_multiplier must be positive, got ", noise_multiplier, "."));
  }
  if (!(truncation_mass > 0.0 && truncation_mass < 1.0)) {
    return absl::InvalidArgumentError("truncation_mass must lie in (0, 1).");
  }
  const double q = sampling_rate;
  const double sigma = noise_multiplier;
  const bool remove = direction == AdjacencyDirection::kRemove;

  // Central region of the outcome distribution.
  const double z = -NormalQuantile(truncation_mass / 2.0);
  const double x_lo = -z * sigma;
  const double x_hi = (remove ? 1.0 : 0.0) + z * sigma;

  // Loss as a function of the outcome; increasing for kRemove, decreasing
  // for kAdd.
  const double sign = remove ? 1.0 : -1.0;
  const double loss_a = sign * MixtureLogRatio(x_lo, q, sigma);
  const double loss_b = sign * MixtureLogRatio(x_hi, q, sigma);
  const double loss_min = std::min(loss_a, loss_b);
  const double loss_max = std::max(loss_a, loss_b);

  const int64_t i_min =
      static_cast<int64_t>(std::ceil(loss_min / grid_spacing));
  const int64_t i_max =
      static_cast<int64_t>(std::ceil(loss_max / grid_spacing));
  const size_t bins = static_cast<size_t>(i_max - i_min + 1);
  if (bins > kMaxSingleStepGridSize) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "single-step PLD needs ", bins,
        " grid points; use a coarser grid_spacing."));
  }

  // Bin k holds losses in (E_k, E_{k+1}], E_0 = loss_min, E_bins = loss_max.
  // Map the loss edges to outcome edges in increasing x.
  std::vector<double> xs(bins + 1);
  for (size_t k = 0; k <= bins; ++k) {
    double edge;
    if (k == 0) {
      edge = loss_min;
    } else if (k == bins) {
      edge = loss_max;
    } else {
      edge = static_cast<double>(i_min - 1 + static_cast<int64_t>(k)) *
             grid_spacing;
    }
    const double x = MixtureLogRatioInverse(sign * edge, q, sigma);
    xs[remove ? k : bins - k] = std::clamp(x, x_lo, x_hi);
  }
  xs.front() = x_lo;
  xs.back() = x_hi;

  std::vector<GaussianComponent> mixture;
  if (remove) {
    mixture = {{q, 1.0}, {1.0 - q, 0.0}};
  } else {
    mixture = {{1.0, 0.0}};
  }
  std::vector<double> cells = CellMasses(xs, sigma, mixture);
  if (!remove) std::reverse(cells.begin(), cells.end());

  // Mass outside [x_lo, x_hi], computed directly rather than as 1 - sum.
  double infinity_mass = 0.0;
  for (const GaussianComponent& c : mixture) {
    infinity_mass +=
        c.weight * (NormalCdf((x_lo - c.mean) / sigma) +
                    NormalSurvival((x_hi - c.mean) / sigma));
  }

  // Trim empty bins.
  size_t front = 0;
  while (front + 1 < cells.size() && cells[front] == 0.0) ++front;
  size_t back = cells.size();
  while (back > front + 1 && cells[back - 1] == 0.0) --back;
  std::vector<double> masses(cells.begin() + front, cells.begin() + back);
  return PrivacyLossDistribution(grid_spacing,
                                 i_min + static_cast<int64_t>(front),
                                 std::move(masses), infinity_mass);
}

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::Compose(
    const PrivacyLossDistribution& other,
    const CompositionOptions& options) const {
  if (other.grid_spacing_ != grid_spacing_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot compose PLDs with grid spacings ", grid_spacing_, " and ",
        other.grid_spacing_, "."));
  }
  const size_t size = masses_.size() + other.masses_.size() - 1;
  if (size > options.max_grid_size) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "composed PLD needs ", size, " grid points (cap ",
        options.max_grid_size, "); use a coarser grid_spacing."));
  }
  std::vector<double> masses = Convolve(masses_, other.masses_);
  for (double& m : masses) m = std::max(m, 0.0);
  auto [front, dropped] =
      TruncateTails(masses, options.tail_mass_truncation);
  const double infinity_mass =
      std::min(1.0, infinity_mass_ + other.infinity_mass_ -
                        infinity_mass_ * other.infinity_mass_ + dropped);
  return PrivacyLossDistribution(
      grid_spacing_,
      lower_index_ + other.lower_index_ + static_cast<int64_t>(front),
      std::move(masses), infinity_mass);
}

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::SelfCompose(
    int64_t times, const CompositionOptions& options) const {
  if (times < 0) {
    return absl::InvalidArgumentError("composition count must be >= 0.");
  }
  if (times == 0) return Identity(grid_spacing_);
  if (times == 1) return *this;
  const auto [lower, upper] =
      SumSupportBounds(masses_, times, kWindowTailMass);
  const size_t window = static_cast<size_t>(upper - lower + 1);
  if (window > options.max_grid_size) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "composed PLD needs ", window, " grid points (cap ",
        options.max_grid_size, "); use a coarser grid_spacing."));
  }
  const size_t size = FftFriendlySize(std::max(window, masses_.size()));
  const std::vector<double> circular = CircularPower(masses_, times, size);
  std::vector<double> masses(window);
  for (size_t k = 0; k < window; ++k) {
    masses[k] =
        std::max(circular[(static_cast<size_t>(lower) + k) % size], 0.0);
  }
  auto [front, dropped] =
      TruncateTails(masses, options.tail_mass_truncation);
  const double composed_infinity = -std::expm1(
      static_cast<double>(times) * std::log1p(-infinity_mass_));
  return PrivacyLossDistribution(
      grid_spacing_,
      times * lower_index_ + lower + static_cast<int64_t>(front),
      std::move(masses), std::min(1.0, composed_infinity + dropped));
}

double PrivacyLossDistribution::DeltaForEpsilon(double epsilon) const {
  double delta = 0.0;
  for (size_t i = masses_.size(); i-- > 0;) {
    const double loss = Loss(i);
    if (loss <= epsilon) break;
    delta += masses_[i] * -std::expm1(epsilon - loss);
  }
  return std::clamp(delta + infinity_mass_, 0.0, 1.0);
}

double PrivacyLossDistribution::FiniteMean() const {
  double mean = 0.0;
  for (size_t i = 0; i < masses_.size(); ++i) mean += masses_[i] * Loss(i);
  return mean;
}

double PrivacyLossDistribution::FiniteMass() const {
  double total = 0.0;
  for (double m : masses_) total += m;
  return total;
}

PrivacyProfile::Tail PrivacyProfile::MakeTail(
    const PrivacyLossDistribution& pld) {
  Tail tail;
  tail.grid_spacing = pld.grid_spacing();
  tail.lower_index = pld.lower_index();
  tail.infinity_mass = pld.infinity_mass();
  const std::vector<double>& masses = pld.masses();
  tail.mass_above.assign(masses.size() + 1, 0.0);
  tail.weighted_above.assign(masses.size() + 1, 0.0);
  for (size_t i = masses.size(); i-- > 0;) {
    tail.mass_above[i] = tail.mass_above[i + 1] + masses[i];
    tail.weighted_above[i] =
        tail.weighted_above[i + 1] + masses[i] * std::exp(-pld.Loss(i));
  }
  return tail;
}

double PrivacyProfile::Tail::Delta(double epsilon) const {
  const int64_t n = static_cast<int64_t>(mass_above.size()) - 1;
  const double scaled = std::floor(epsilon / grid_spacing);
  int64_t first;
  if (scaled < static_cast<double>(lower_index)) {
    first = 0;
  } else if (scaled >= static_cast<double>(lower_index + n)) {
    first = n;
  } else {
    first = static_cast<int64_t>(scaled) + 1 - lower_index;
  }
  auto loss = [&](int64_t i) {
    return static_cast<double>(lower_index + i) * grid_spacing;
  };
  while (first > 0 && loss(first - 1) > epsilon) --first;
  while (first < n && loss(first) <= epsilon) ++first;
  const double delta = mass_above[first] -
                       std::exp(epsilon) * weighted_above[first] +
                       infinity_mass;
  return std::clamp(delta, 0.0, 1.0);
}

PrivacyProfile PrivacyProfile::FromPlds(
    const PrivacyLossDistribution& add,
    const PrivacyLossDistribution& remove) {
  PrivacyProfile profile;
  profile.add_ = MakeTail(add);
  profile.remove_ = MakeTail(remove);
  return profile;
}

double PrivacyProfile::Delta(double epsilon,
                             AdjacencyDirection direction) const {
  return direction == AdjacencyDirection::kAdd ? add_.Delta(epsilon)
                                               : remove_.Delta(epsilon);
}

double PrivacyProfile::WorstDelta(double epsilon) const {
  return std::max(add_.Delta(epsilon), remove_.Delta(epsilon));
}

}  // namespace hsaudit
