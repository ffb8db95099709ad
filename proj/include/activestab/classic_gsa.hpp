// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/activesub.hpp"
#include "activestab/models.hpp"

#include <cstdint>

namespace activestab {

/// Elementary-effect statistics, effects measured in coordinates scaled to the box.
struct MorrisResult {
  Vector mu;
  Vector mu_star;
  Vector sigma;
  std::size_t r = 0;
  std::size_t p = 0;

  /// Parameters ordered by mu_star, largest first.
  Ranking ranking() const { return rank_descending(mu_star); }
};

struct SobolResult {
  Vector first_order;
  Vector total_effect;
  std::size_t N = 0;

  /// Parameters ordered by total-effect index, largest first.
  Ranking ranking() const { return rank_descending(total_effect); }
};

struct MorrisOptions {
  std::size_t trajectories = 100;
  std::size_t levels = 8;
};

struct SobolOptions {
  std::size_t base_samples = 1 << 14;
};

/// Randomised one-at-a-time Morris trajectories on a p-level grid.
///
/// Levels sit at the centres of p equal cells of each scaled axis, (j + 1/2)/p, and
/// every move jumps p/2 levels (a step of 1/2), so no evaluation touches the box
/// boundary. Each trajectory starts from a random lower-half level with random move
/// directions and a random axis order; the elementary effect of axis i is
/// (f(x + d e_i) - f(x)) / d with d = +-1/2 carrying its sign.
MorrisResult morris(const QoiModel& model, const ParameterSpace& box, const MorrisOptions& options,
                    std::uint64_t seed);

/// Saltelli A/B/AB_i scheme with two independent LHS matrices: (m + 2) N evaluations.
/// First order: Saltelli (2010); total effect: Jansen. Both divided by the variance
/// of the pooled f(A), f(B). Throws UndefinedIndicesError when that variance is zero.
SobolResult sobol(const QoiModel& model, const ParameterSpace& box, const SobolOptions& options, std::uint64_t seed);

}  // namespace activestab
