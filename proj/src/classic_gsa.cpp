// SPDX-License-Identifier: Apache-2.0
#include "activestab/classic_gsa.hpp"

#include "activestab/error.hpp"
#include "activestab/parallel.hpp"
#include "activestab/sampling.hpp"

#include <cmath>
#include <numeric>

namespace activestab {

MorrisResult morris(const QoiModel& model, const ParameterSpace& box, const MorrisOptions& options,
                    std::uint64_t seed) {
  const std::size_t m = box.dim();
  const std::size_t r = options.trajectories;
  const std::size_t p = options.levels;
  if (p < 2 || p % 2 != 0) throw InvalidArgumentError("Morris level count must be even and >= 2");
  if (r < 2) throw InvalidArgumentError("Morris needs at least 2 trajectories");
  if (model.dim != m) throw DimensionMismatchError("Morris: box dimension does not match model");

  const double delta = 0.5;
  const std::size_t jump = p / 2;
  auto level = [p](std::size_t j) { return (static_cast<double>(j) + 0.5) / static_cast<double>(p); };

  Rng rng(seed);
  const std::size_t per_traj = m + 1;
  PointSet points(static_cast<Eigen::Index>(r * per_traj), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> axis_order(r * m);
  std::vector<double> direction(r * m);

  std::vector<double> u(m), x(m);
  std::vector<std::size_t> perm(m);
  for (std::size_t t = 0; t < r; ++t) {
    std::vector<double> sign(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t base = rng.index(jump);
      sign[i] = rng.index(2) == 0 ? 1.0 : -1.0;
      u[i] = level(sign[i] > 0 ? base : base + jump);
    }
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);

    auto put = [&](std::size_t row) {
      box.from_unit(u, x);
      for (std::size_t i = 0; i < m; ++i)
        points(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(i)) = x[i];
    };
    put(t * per_traj);
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t axis = perm[s];
      u[axis] += sign[axis] * delta;
      put(t * per_traj + s + 1);
      axis_order[t * m + s] = axis;
      direction[t * m + s] = sign[axis];
    }
  }

  std::vector<double> f(static_cast<std::size_t>(points.rows()));
  evaluate_parallel(model, points, f);

  Matrix effects(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t s = 0; s < m; ++s) {
      const double before = f[t * per_traj + s];
      const double after = f[t * per_traj + s + 1];
      if (!std::isfinite(before) || !std::isfinite(after))
        throw Error("Morris: non-finite model output on trajectory " + std::to_string(t) + ", step " +
                    std::to_string(s));
      effects(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(axis_order[t * m + s])) =
          (after - before) / (direction[t * m + s] * delta);
    }
  }

  MorrisResult out;
  out.r = r;
  out.p = p;
  out.mu = effects.colwise().mean().transpose();
  out.mu_star = effects.cwiseAbs().colwise().mean().transpose();
  out.sigma.resize(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
    const double var = (effects.col(i).array() - out.mu[i]).square().sum() / static_cast<double>(r - 1);
    out.sigma[i] = std::sqrt(var);
  }
  return out;
}

SobolResult sobol(const QoiModel& model, const ParameterSpace& box, const SobolOptions& options, std::uint64_t seed) {
  const std::size_t N = options.base_samples;
  const std::size_t m = box.dim();
  if (N < 2) throw InvalidArgumentError("Sobol needs at least 2 base samples");
  if (model.dim != m) throw DimensionMismatchError("Sobol: box dimension does not match model");

  const PointSet A = lhs(N, box, derive_seed(seed, 0));
  const PointSet B = lhs(N, box, derive_seed(seed, 1));
  const auto n = static_cast<Eigen::Index>(N);
  PointSet all(static_cast<Eigen::Index>((m + 2) * N), static_cast<Eigen::Index>(m));
  all.topRows(n) = A;
  all.middleRows(n, n) = B;
  for (std::size_t i = 0; i < m; ++i) {
    auto block = all.middleRows(static_cast<Eigen::Index>(i + 2) * n, n);
    block = A;
    block.col(static_cast<Eigen::Index>(i)) = B.col(static_cast<Eigen::Index>(i));
  }

  std::vector<double> f(static_cast<std::size_t>(all.rows()));
  evaluate_parallel(model, all, f);
  const Eigen::Map<const Vector> fa(f.data(), n);
  const Eigen::Map<const Vector> fb(f.data() + N, n);

  const double mean = (fa.sum() + fb.sum()) / static_cast<double>(2 * N);
  const double variance =
      ((fa.array() - mean).square().sum() + (fb.array() - mean).square().sum()) / static_cast<double>(2 * N);
  if (!(variance > 0.0)) throw UndefinedIndicesError("Sobol indices undefined: model output has zero variance");

  SobolResult out;
  out.N = N;
  out.first_order.resize(static_cast<Eigen::Index>(m));
  out.total_effect.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Map<const Vector> fab(f.data() + (i + 2) * N, n);
    out.first_order[static_cast<Eigen::Index>(i)] =
        (fb.array() * (fab - fa).array()).mean() / variance;
    out.total_effect[static_cast<Eigen::Index>(i)] = 0.5 * (fa - fab).array().square().mean() / variance;
  }
  return out;
}

}  // namespace activestab
