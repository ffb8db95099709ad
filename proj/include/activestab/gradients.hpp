// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/models.hpp"
#include "activestab/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace activestab {

inline constexpr double kDefaultFdStep = 1e-5;

enum class GradientMode { finite_difference, analytic };

struct GradientOptions {
  GradientMode mode = GradientMode::finite_difference;
  /// Step in unit-scaled coordinates.
  double h = kDefaultFdStep;
  /// Also evaluate f at the point itself (one extra model call for interior points).
  bool with_value = false;
};

/// Gradient at one point, with respect to coordinates scaled to [0,1] over the box.
struct GradientSample {
  Vector x;
  Vector g;
  std::optional<double> f_center;
};

/// Central differences in coordinates scaled by the box widths:
///   g_i = (f(x + h w_i e_i) - f(x - h w_i e_i)) / (2h),  w_i = upper_i - lower_i.
/// A stencil point that would leave `box` is replaced by the second-order one-sided
/// formula on the inward side. `box` is the model's admissible box, not a local region.
Vector central_diff(const QoiModel& model, const ParameterSpace& box, std::span<const double> x,
                    double h = kDefaultFdStep);

/// One sample per row of `points`, order preserved. Points are distributed over the
/// OpenMP workers; failures are collected and rethrown together as GradientBatchError.
std::vector<GradientSample> gradient_batch(const QoiModel& model, const ParameterSpace& box,
                                           const PointSet& points, const GradientOptions& options = {});

/// Analytic gradient converted to scaled coordinates (multiplied by the box widths).
Vector scaled_analytic_gradient(const QoiModel& model, const ParameterSpace& box, std::span<const double> x);

}  // namespace activestab
