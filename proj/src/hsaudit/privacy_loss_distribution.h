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

// Discretized privacy loss distributions (PLDs) for the Poisson-subsampled
// Gaussian mechanism, their composition, and hockey-stick delta queries.

#ifndef HSAUDIT_PRIVACY_LOSS_DISTRIBUTION_H_
#define HSAUDIT_PRIVACY_LOSS_DISTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"

namespace hsaudit {

// Which neighbour plays the role of the first distribution in the privacy
// loss. With mu0 = N(0, s^2) and mu1 = q N(1, s^2) + (1 - q) N(0, s^2):
//   kRemove: loss ln(mu1 / mu0) for outcomes drawn from mu1,
//   kAdd:    loss ln(mu0 / mu1) for outcomes drawn from mu0.
enum class AdjacencyDirection { kAdd, kRemove };

struct CompositionOptions {
  // Mass dropped into infinity_mass from each tail after every convolution.
  double tail_mass_truncation = 1e-14;
  // Largest number of grid points a composed PLD may occupy.
  size_t max_grid_size = size_t{1} << 25;
};

class PrivacyLossDistribution {
 public:
  // masses[i] is the probability of loss (lower_index + i) * grid_spacing.
  static absl::StatusOr<PrivacyLossDistribution> Create(
      double grid_spacing, int64_t lower_index, std::vector<double> masses,
      double infinity_mass);

  // Point mass at zero loss: the neutral element of composition.
  static absl::StatusOr<PrivacyLossDistribution> Identity(double grid_spacing);

  // One step of the subsampled Gaussian mechanism with sensitivity 1. Each
  // loss is rounded up to the grid. Outcomes outside the central region
  // holding all but `truncation_mass` of the probability are sent to
  // infinity_mass.
  static absl::StatusOr<PrivacyLossDistribution> SubsampledGaussian(
      double sampling_rate, double noise_multiplier, double grid_spacing,
      AdjacencyDirection direction, double truncation_mass = 1e-12);

  absl::StatusOr<PrivacyLossDistribution> Compose(
      const PrivacyLossDistribution& other,
      const CompositionOptions& options = {}) const;

  // `times`-fold self-composition by repeated squaring.
  absl::StatusOr<PrivacyLossDistribution> SelfCompose(
      int64_t times, const CompositionOptions& options = {}) const;

  // sum_i masses[i] * max(0, 1 - e^(eps - loss_i)) + infinity_mass.
  double DeltaForEpsilon(double epsilon) const;

  // sum_i masses[i] * loss_i over the finite part.
  double FiniteMean() const;
  double FiniteMass() const;

  double grid_spacing() const { return grid_spacing_; }
  int64_t lower_index() const { return lower_index_; }
  double origin() const { return lower_index_ * grid_spacing_; }
  const std::vector<double>& masses() const { return masses_; }
  double infinity_mass() const { return infinity_mass_; }
  double Loss(size_t i) const {
    return static_cast<double>(lower_index_ + static_cast<int64_t>(i)) *
           grid_spacing_;
  }

 private:
  PrivacyLossDistribution(double grid_spacing, int64_t lower_index,
                          std::vector<double> masses, double infinity_mass)
      : grid_spacing_(grid_spacing),
        lower_index_(lower_index),
        masses_(std::move(masses)),
        infinity_mass_(infinity_mass) {}

  double grid_spacing_;
  int64_t lower_index_;
  std::vector<double> masses_;
  double infinity_mass_;
};

// delta(eps) for both adjacency directions, with O(log n) queries backed by
// suffix sums over each PLD.
class PrivacyProfile {
 public:
  static PrivacyProfile FromPlds(const PrivacyLossDistribution& add,
                                 const PrivacyLossDistribution& remove);

  double Delta(double epsilon, AdjacencyDirection direction) const;
  // Larger of the two directions.
  double WorstDelta(double epsilon) const;

 private:
  struct Tail {
    double grid_spacing = 1.0;
    int64_t lower_index = 0;
    // Sums over j >= i of p_j and p_j * e^(-loss_j); one extra zero entry.
    std::vector<double> mass_above;
    std::vector<double> weighted_above;
    double infinity_mass = 0.0;

    double Delta(double epsilon) const;
  };
  static Tail MakeTail(const PrivacyLossDistribution& pld);

  Tail add_;
  Tail remove_;
};

}  // namespace hsaudit

#endif  // HSAUDIT_PRIVACY_LOSS_DISTRIBUTION_H_
