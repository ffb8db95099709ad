// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace activestab {

/// Named axis-aligned box carrying the uniform parameter density.
struct ParameterSpace {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;

  /// Validates lower < upper on every axis and that all three vectors agree in length.
  ParameterSpace(std::vector<std::string> names, std::vector<double> lower, std::vector<double> upper);
  ParameterSpace() = default;

  /// [0,1]^dim with axes named x1..x<dim>.
  static ParameterSpace unit(std::size_t dim);

  std::size_t dim() const noexcept { return lower.size(); }
  double width(std::size_t axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
  bool contains(std::span<const double> x) const;

  /// Maps a point of [0,1]^m into the box.
  void from_unit(std::span<const double> u, std::span<double> x) const;

  bool operator==(const ParameterSpace&) const = default;
};

/// Uniform partition of a ParameterSpace into bins_per_dim^m axis-aligned regions.
///
/// Region index <-> multi-index is mixed-radix with the first declared axis as
/// the most significant digit. Bins are half-open [lo, hi) except the last one
/// on each axis, which is closed.
struct RegionGrid {
  ParameterSpace space;
  std::size_t bins_per_dim = 1;
  std::size_t total_regions = 1;

  std::vector<std::size_t> multi_index(std::size_t region_index) const;
  std::size_t region_index(std::span<const std::size_t> multi) const;
  /// Region that owns the point; throws std::out_of_range outside the space.
  std::size_t locate(std::span<const double> x) const;
};

RegionGrid grid_partition(const ParameterSpace& space, std::size_t bins_per_dim);

/// Sub-box of region `index`. Throws std::out_of_range for index >= total_regions.
ParameterSpace region_bounds(const RegionGrid& grid, std::size_t index);

/// SplitMix64 finaliser applied to the (master, region) pair.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t region_index);

/// Random stream used everywhere in the library: a std::mt19937_64 whose seed has
/// been passed through derive_seed, so nearby integer seeds give unrelated streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), built from the top 53 bits.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Latin Hypercube design of `count` points over `box`: one point per stratum per
/// axis, uniform within the open interior of each stratum, independent axis permutations.
PointSet lhs(std::size_t count, const ParameterSpace& box, std::uint64_t seed);

struct SamplingPlan {
  std::size_t samples = 10;  ///< per region, or in total for a global plan
  std::uint64_t master_seed = 0;
};

}  // namespace activestab
