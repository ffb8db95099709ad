// SPDX-License-Identifier: Apache-2.0
#include "activestab/parallel.hpp"

#include "activestab/error.hpp"

#include <omp.h>

#include <algorithm>

namespace activestab {

namespace {

int default_workers() {
  static const int n = omp_get_max_threads();
  return n;
}

constexpr Eigen::Index kEvalChunk = 64;

}  // namespace

void set_worker_count(int workers) { omp_set_num_threads(workers > 0 ? workers : default_workers()); }

int worker_count() { return omp_get_max_threads(); }

void evaluate_parallel(const QoiModel& model, const PointSet& points, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(points.rows()))
    throw DimensionMismatchError("evaluate_parallel: output size mismatch");
  const Eigen::Index rows = points.rows();
  const Eigen::Index chunks = (rows + kEvalChunk - 1) / kEvalChunk;
  std::vector<std::string> errors(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kEvalChunk;
    const Eigen::Index count = std::min(kEvalChunk, rows - begin);
    try {
      const PointSet block = points.middleRows(begin, count);
      model.evaluate_rows(block, out.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(count)));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(c)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error("model evaluation failed: " + e);
}

}  // namespace activestab
