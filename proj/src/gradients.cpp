// SPDX-License-Identifier: Apache-2.0
#include "activestab/gradients.hpp"

#include "activestab/error.hpp"

#include <cmath>
#include <sstream>

namespace activestab {

namespace {

enum class Stencil { central, forward, backward };

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

struct FdResult {
  Vector g;
  std::optional<double> f_center;
};

FdResult finite_difference(const QoiModel& model, const ParameterSpace& box, std::span<const double> x, double h,
                           bool with_value) {
  const std::size_t m = box.dim();
  if (x.size() != m || model.dim != m) throw DimensionMismatchError("gradient: point dimension does not match model");
  if (!(h > 0.0)) throw InvalidArgumentError("finite-difference step must be positive");

  std::vector<Stencil> kind(m, Stencil::central);
  bool need_center = with_value;
  for (std::size_t i = 0; i < m; ++i) {
    const double delta = h * box.width(i);
    if (x[i] - delta < box.lower[i]) {
      kind[i] = Stencil::forward;
      need_center = true;
    } else if (x[i] + delta > box.upper[i]) {
      kind[i] = Stencil::backward;
      need_center = true;
    }
  }

  // Rows: 2 per axis, then the centre if needed.
  const auto rows = static_cast<Eigen::Index>(2 * m + (need_center ? 1 : 0));
  PointSet stencil(rows, static_cast<Eigen::Index>(m));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m; ++j) stencil(r, static_cast<Eigen::Index>(j)) = x[j];
  for (std::size_t i = 0; i < m; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto r0 = static_cast<Eigen::Index>(2 * i);
    const double delta = h * box.width(i);
    switch (kind[i]) {
      case Stencil::central:
        stencil(r0, col) = x[i] + delta;
        stencil(r0 + 1, col) = x[i] - delta;
        break;
      case Stencil::forward:
        stencil(r0, col) = x[i] + delta;
        stencil(r0 + 1, col) = x[i] + 2.0 * delta;
        break;
      case Stencil::backward:
        stencil(r0, col) = x[i] - delta;
        stencil(r0 + 1, col) = x[i] - 2.0 * delta;
        break;
    }
  }

  std::vector<double> f(static_cast<std::size_t>(rows));
  model.evaluate_rows(stencil, f);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::isfinite(f[static_cast<std::size_t>(r)])) {
      auto p = row_span(stencil, r);
      throw GradientEvaluationError("non-finite model output at stencil point " + format_point(p),
                                    std::vector<double>(p.begin(), p.end()));
    }
  }

  FdResult out{Vector(static_cast<Eigen::Index>(m)), std::nullopt};
  const double f0 = need_center ? f.back() : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = f[2 * i];
    const double b = f[2 * i + 1];
    double gi = 0.0;
    switch (kind[i]) {
      case Stencil::central:
        gi = (a - b) / (2.0 * h);
        break;
      case Stencil::forward:
        gi = (-3.0 * f0 + 4.0 * a - b) / (2.0 * h);
        break;
      case Stencil::backward:
        gi = (3.0 * f0 - 4.0 * a + b) / (2.0 * h);
        break;
    }
    out.g[static_cast<Eigen::Index>(i)] = gi;
  }
  if (with_value) out.f_center = f0;
  return out;
}

}  // namespace

Vector central_diff(const QoiModel& model, const ParameterSpace& box, std::span<const double> x, double h) {
  return finite_difference(model, box, x, h, false).g;
}

Vector scaled_analytic_gradient(const QoiModel& model, const ParameterSpace& box, std::span<const double> x) {
  if (!model.has_analytic_gradient())
    throw InvalidArgumentError("model '" + model.name + "' has no analytic gradient");
  const std::size_t m = box.dim();
  if (x.size() != m || model.dim != m) throw DimensionMismatchError("gradient: point dimension does not match model");
  Vector g(static_cast<Eigen::Index>(m));
  model.analytic_gradient(x, std::span<double>(g.data(), m));
  for (std::size_t i = 0; i < m; ++i) g[static_cast<Eigen::Index>(i)] *= box.width(i);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(g[static_cast<Eigen::Index>(i)]))
      throw GradientEvaluationError("non-finite analytic gradient at " + format_point(x),
                                    std::vector<double>(x.begin(), x.end()));
  }
  return g;
}

namespace detail {

GradientSample gradient_at(const QoiModel& model, const ParameterSpace& box, std::span<const double> x,
                           const GradientOptions& options) {
  GradientSample s;
  s.x = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  if (options.mode == GradientMode::analytic) {
    s.g = scaled_analytic_gradient(model, box, x);
    if (options.with_value) s.f_center = model.evaluate(x);
  } else {
    auto fd = finite_difference(model, box, x, options.h, options.with_value);
    s.g = std::move(fd.g);
    s.f_center = fd.f_center;
  }
  return s;
}

}  // namespace detail

std::vector<GradientSample> gradient_batch(const QoiModel& model, const ParameterSpace& box, const PointSet& points,
                                           const GradientOptions& options) {
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
  std::vector<GradientSample> out(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  std::vector<char> failed(static_cast<std::size_t>(n), 0);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      out[u] = detail::gradient_at(model, box, row_span(points, i), options);
    } catch (const std::exception& e) {
      failed[u] = 1;
      errors[u] = e.what();
    }
  }

  std::vector<GradientBatchError::Failure> failures;
  for (std::size_t i = 0; i < failed.size(); ++i)
    if (failed[i]) failures.push_back({i, std::move(errors[i])});
  if (!failures.empty()) throw GradientBatchError(std::move(failures));
  return out;
}

GradientBatchError::GradientBatchError(std::vector<Failure> failures)
    : Error("gradient evaluation failed at " + std::to_string(failures.size()) + " point(s); first: point " +
            std::to_string(failures.front().index) + ": " + failures.front().message),
      failures_(std::move(failures)) {}

}  // namespace activestab
