// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <span>

namespace activestab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// One point per row; rows are contiguous so a point can be handed out as a span.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const PointSet& points, Eigen::Index row) {
  return {points.row(row).data(), static_cast<std::size_t>(points.cols())};
}

inline std::span<double> row_span(PointSet& points, Eigen::Index row) {
  return {points.row(row).data(), static_cast<std::size_t>(points.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace activestab
