// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/models.hpp"
#include "activestab/types.hpp"

#include <span>

namespace activestab {

/// Worker count used by the OpenMP kernels; 0 restores the runtime default.
void set_worker_count(int workers);
int worker_count();

/// Evaluates every row of `points` in fixed-size chunks spread over the workers.
/// Chunking does not depend on the worker count, so output is bit-reproducible.
void evaluate_parallel(const QoiModel& model, const PointSet& points, std::span<double> out);

}  // namespace activestab
