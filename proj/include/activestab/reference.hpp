// SPDX-License-Identifier: Apache-2.0
#pragma once

// Straightforward serial versions of the parallel kernels, used as test oracles
// and as the baseline in the benchmarks.

#include "activestab/activesub.hpp"
#include "activestab/gradients.hpp"
#include "activestab/stability.hpp"

#include <vector>

namespace activestab::reference {

/// Point-by-point gradients with one scalar model call per stencil point.
std::vector<GradientSample> gradient_batch(const QoiModel& model, const ParameterSpace& box, const PointSet& points,
                                           const GradientOptions& options = {});

/// Single running sum in sample order.
CMatrix estimate_c(std::span<const GradientSample> samples);

/// Regions analysed one after another on the calling thread.
std::vector<LocalAnalysis> sweep(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                                 const SubspaceResult& global_subspace, const AnalysisOptions& options);

/// Row-by-row model evaluation.
std::vector<double> evaluate(const QoiModel& model, const PointSet& points);

}  // namespace activestab::reference
