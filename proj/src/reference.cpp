// SPDX-License-Identifier: Apache-2.0
#include "activestab/reference.hpp"

#include "activestab/error.hpp"

#include <cmath>

namespace activestab::reference {

namespace {

Vector fd_gradient(const QoiModel& model, const ParameterSpace& box, std::span<const double> x, double h) {
  const std::size_t m = box.dim();
  std::vector<double> p(x.begin(), x.end());
  auto f_at = [&](std::size_t axis, double value) {
    p[axis] = value;
    const double f = model.evaluate(p);
    if (!std::isfinite(f)) throw GradientEvaluationError("non-finite model output", p);
    p[axis] = x[axis];
    return f;
  };
  Vector g(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double d = h * box.width(i);
    double gi;
    if (x[i] - d < box.lower[i]) {
      gi = (-3.0 * model.evaluate(x) + 4.0 * f_at(i, x[i] + d) - f_at(i, x[i] + 2.0 * d)) / (2.0 * h);
    } else if (x[i] + d > box.upper[i]) {
      gi = (3.0 * model.evaluate(x) - 4.0 * f_at(i, x[i] - d) + f_at(i, x[i] - 2.0 * d)) / (2.0 * h);
    } else {
      gi = (f_at(i, x[i] + d) - f_at(i, x[i] - d)) / (2.0 * h);
    }
    g[static_cast<Eigen::Index>(i)] = gi;
  }
  return g;
}

}  // namespace

std::vector<GradientSample> gradient_batch(const QoiModel& model, const ParameterSpace& box, const PointSet& points,
                                           const GradientOptions& options) {
  std::vector<GradientSample> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const auto x = row_span(points, r);
    GradientSample s;
    s.x = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    s.g = options.mode == GradientMode::analytic ? scaled_analytic_gradient(model, box, x)
                                                 : fd_gradient(model, box, x, options.h);
    if (options.with_value) s.f_center = model.evaluate(x);
    out.push_back(std::move(s));
  }
  return out;
}

CMatrix estimate_c(std::span<const GradientSample> samples) {
  if (samples.empty()) throw InvalidArgumentError("estimate_c needs at least one gradient sample");
  const Eigen::Index m = samples.front().g.size();
  Matrix c = Matrix::Zero(m, m);
  for (const auto& s : samples) {
    if (s.g.size() != m) throw DimensionMismatchError("estimate_c: gradient samples differ in length");
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) c(i, j) += s.g[i] * s.g[j];
  }
  c /= static_cast<double>(samples.size());
  return {0.5 * (c + c.transpose()), samples.size()};
}

std::vector<LocalAnalysis> sweep(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                                 const SubspaceResult& global_subspace, const AnalysisOptions& options) {
  std::vector<LocalAnalysis> out;
  out.reserve(grid.total_regions);
  for (std::size_t r = 0; r < grid.total_regions; ++r)
    out.push_back(analyze_region(model, grid, r, plan, global_subspace, options));
  return out;
}

std::vector<double> evaluate(const QoiModel& model, const PointSet& points) {
  std::vector<double> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index r = 0; r < points.rows(); ++r) out[static_cast<std::size_t>(r)] = model.evaluate(row_span(points, r));
  return out;
}

}  // namespace activestab::reference
