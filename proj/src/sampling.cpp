// SPDX-License-Identifier: Apache-2.0
#include "activestab/sampling.hpp"

#include "activestab/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace activestab {

ParameterSpace::ParameterSpace(std::vector<std::string> names_, std::vector<double> lower_,
                               std::vector<double> upper_)
    : names(std::move(names_)), lower(std::move(lower_)), upper(std::move(upper_)) {
  if (names.size() != lower.size() || lower.size() != upper.size())
    throw DimensionMismatchError("parameter space: names, lower and upper differ in length");
  if (lower.empty()) throw InvalidArgumentError("parameter space must have at least one axis");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]))
      throw InvalidArgumentError("parameter space: lower >= upper on axis '" + names[i] + "'");
  }
}

ParameterSpace ParameterSpace::unit(std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
  return {std::move(names), std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

double ParameterSpace::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

bool ParameterSpace::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

void ParameterSpace::from_unit(std::span<const double> u, std::span<double> x) const {
  for (std::size_t i = 0; i < dim(); ++i) x[i] = lower[i] + u[i] * width(i);
}

std::vector<std::size_t> RegionGrid::multi_index(std::size_t region) const {
  if (region >= total_regions) throw std::out_of_range("region index out of range");
  const std::size_t m = space.dim();
  std::vector<std::size_t> multi(m);
  for (std::size_t axis = m; axis-- > 0;) {
    multi[axis] = region % bins_per_dim;
    region /= bins_per_dim;
  }
  return multi;
}

std::size_t RegionGrid::region_index(std::span<const std::size_t> multi) const {
  if (multi.size() != space.dim()) throw DimensionMismatchError("multi-index has wrong length");
  std::size_t index = 0;
  for (std::size_t bin : multi) {
    if (bin >= bins_per_dim) throw std::out_of_range("bin index out of range");
    index = index * bins_per_dim + bin;
  }
  return index;
}

std::size_t RegionGrid::locate(std::span<const double> x) const {
  if (!space.contains(x)) throw std::out_of_range("point outside the parameter space");
  std::vector<std::size_t> multi(space.dim());
  for (std::size_t axis = 0; axis < space.dim(); ++axis) {
    const double t = (x[axis] - space.lower[axis]) / space.width(axis);
    auto bin = static_cast<std::size_t>(t * static_cast<double>(bins_per_dim));
    multi[axis] = std::min(bin, bins_per_dim - 1);
  }
  return region_index(multi);
}

RegionGrid grid_partition(const ParameterSpace& space, std::size_t bins_per_dim) {
  if (bins_per_dim == 0) throw InvalidArgumentError("bins per dimension must be >= 1");
  RegionGrid grid{space, bins_per_dim, 1};
  for (std::size_t i = 0; i < space.dim(); ++i) {
    if (grid.total_regions > std::numeric_limits<std::size_t>::max() / bins_per_dim)
      throw InvalidArgumentError("region count overflows");
    grid.total_regions *= bins_per_dim;
  }
  return grid;
}

ParameterSpace region_bounds(const RegionGrid& grid, std::size_t index) {
  const auto multi = grid.multi_index(index);
  const auto k = static_cast<double>(grid.bins_per_dim);
  const ParameterSpace& s = grid.space;
  std::vector<double> lo(s.dim()), hi(s.dim());
  for (std::size_t axis = 0; axis < s.dim(); ++axis) {
    const auto b = static_cast<double>(multi[axis]);
    lo[axis] = s.lower[axis] + s.width(axis) * (b / k);
    // Last bin ends exactly on the global bound.
    hi[axis] = multi[axis] + 1 == grid.bins_per_dim ? s.upper[axis] : s.lower[axis] + s.width(axis) * ((b + 1.0) / k);
  }
  return {s.names, std::move(lo), std::move(hi)};
}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t region_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(region_index + 0x632be59bd9b4e019ULL));
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

PointSet lhs(std::size_t count, const ParameterSpace& box, std::uint64_t seed) {
  if (count == 0) throw InvalidArgumentError("Latin Hypercube needs at least one sample");
  const std::size_t m = box.dim();
  Rng rng(seed);
  PointSet points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> perm(count);
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t axis = 0; axis < m; ++axis) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Fisher-Yates; the library's own loop keeps designs identical across standard libraries.
    for (std::size_t i = count; i > 1; --i) std::swap(perm[i - 1], perm[rng.engine()() % i]);
    const double lo = box.lower[axis];
    const double w = box.width(axis);
    for (std::size_t j = 0; j < count; ++j) {
      const double u = (static_cast<double>(perm[j]) + rng.uniform_open()) * inv;
      points(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(axis)) = lo + w * u;
    }
  }
  return points;
}

}  // namespace activestab
