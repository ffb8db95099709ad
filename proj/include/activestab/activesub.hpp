// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/gradients.hpp"
#include "activestab/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace activestab {

/// Monte Carlo estimate of E[grad f grad f^T] from M gradient samples.
struct CMatrix {
  Matrix entries;
  std::size_t samples = 0;
};

/// Eigendecomposition of C with the active/inactive split.
///
/// Eigenvalues are sorted descending; each eigenvector's largest-magnitude
/// component is positive. `n == 0` means no active dimension has been chosen yet.
struct SubspaceResult {
  Vector eigenvalues;
  Matrix eigenvectors;
  std::size_t n = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  Matrix W1() const { return eigenvectors.leftCols(static_cast<Eigen::Index>(n)); }
  Matrix W2() const { return eigenvectors.rightCols(static_cast<Eigen::Index>(dim() - n)); }
  /// Copy with the active dimension set; throws InvalidArgumentError unless 1 <= n <= m.
  SubspaceResult with_dimension(std::size_t n) const;
};

/// Parameter indices, most influential first.
using Ranking = std::vector<std::size_t>;

struct ActivityScores {
  Vector raw;
  Vector normalized;  ///< raw / max(raw)
  Ranking ranking;
};

struct ActiveVars {
  Vector y;
  Vector z;
};

enum class DistanceNorm { spectral, frobenius };

/// C = (1/M) sum g g^T, symmetrised. Samples are accumulated in fixed chunks and the
/// chunk sums combined pairwise, so the result does not depend on the worker count.
CMatrix estimate_c(std::span<const GradientSample> samples);

/// Cyclic Jacobi decomposition, eigenvalues within -1e-10*lambda_1 of zero clamped to 0.
SubspaceResult eigendecompose(const CMatrix& c);

/// Position of the largest log10 gap lambda_j / lambda_{j+1}, with lambda_{j+1}
/// floored at 1e-14*lambda_1. Throws DegenerateSpectrumError when all eigenvalues are 0.
std::size_t select_dimension(const Vector& eigenvalues);

/// alpha_i = sum_{j=1..m} lambda_j w_ij^2. Ties rank by ascending parameter index.
ActivityScores activity_scores(const SubspaceResult& subspace);

/// Descending sort of scores; equal scores keep ascending index order.
Ranking rank_descending(const Vector& scores);

/// ||W1 W1^T - V1 V1^T|| for two m x n matrices with orthonormal columns.
/// The spectral norm is the sine of the largest principal angle.
double subspace_distance(const Matrix& w1_a, const Matrix& w1_b, DistanceNorm norm = DistanceNorm::spectral);

/// y = W1^T x, z = W2^T x.
ActiveVars project(const Vector& x, const SubspaceResult& subspace);

}  // namespace activestab
