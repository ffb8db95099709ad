// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/types.hpp"

namespace activestab {

struct SymmetricEigen {
  Vector values;   ///< unsorted, in Jacobi order
  Matrix vectors;  ///< column j pairs with values[j]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for small dense symmetric matrices. Stops once the
/// off-diagonal Frobenius mass falls below rel_tol * ||A||_F; throws ConvergenceError
/// after max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& a, double rel_tol = 1e-14, int max_sweeps = 100);

/// Largest |eigenvalue| of a symmetric matrix.
double spectral_norm_symmetric(const Matrix& a);

}  // namespace activestab
