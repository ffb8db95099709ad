// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/activesub.hpp"
#include "activestab/models.hpp"
#include "activestab/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace activestab {

enum class SubspaceSource { global, local };

const char* source_name(SubspaceSource source);

/// Exponent vectors of every monomial of total degree <= d in n variables, constant
/// first, then by degree, graded-lexicographic within a degree (y1^2 before y1 y2).
std::vector<std::vector<int>> monomial_exponents(std::size_t n, int d);

/// C(n + d, d).
std::size_t coefficient_count(std::size_t n, int d);

Vector monomial_basis(const Vector& y, int d);

/// Affine map y -> (y - mean) / scale fitted on training data.
struct Standardizer {
  Vector mean;
  Vector scale;

  Vector apply(const Vector& y) const { return ((y - mean).array() / scale.array()).matrix(); }
};

struct SurrogateModel {
  SubspaceSource source = SubspaceSource::global;
  std::size_t n = 0;
  int order = 1;
  Vector coefficients;  ///< in standardised coordinates
  Standardizer standardizer;
  double train_rss = 0.0;
  double test_rss = 0.0;
  double aic = 0.0;

  /// Prediction at active coordinates y.
  double predict(const Vector& y) const;
};

/// Least squares on the monomial basis of the standardised active variables
/// (complete orthogonal decomposition, minimum-norm on rank deficiency).
/// `active` holds one training point per row. Throws UnderdeterminedError when there
/// are fewer rows than coefficients.
SurrogateModel fit_polynomial(const Matrix& active, const Vector& q, int d);

double residual_sum_of_squares(const SurrogateModel& model, const Matrix& active, const Vector& q);

/// AIC = N ln(rss / N) + 2 k, rss floored at 1e-30. Throws InvalidArgumentError when N <= k.
double aic(double rss, std::size_t n_params, std::size_t n_points);

enum class AicBasis { test, train };

struct SurrogateOptions {
  std::size_t train_count = 500;
  std::size_t test_count = 500;
  AicBasis aic_basis = AicBasis::test;
  std::vector<int> orders{1, 2, 3};
};

struct SurrogateSelection {
  std::vector<SurrogateModel> candidates;  ///< fitted orders, ascending
  std::size_t best = 0;                    ///< index into candidates
  Vector test_actual;
  Vector test_predicted;                   ///< from the selected candidate
  double rmse = 0.0;

  const SurrogateModel& selected() const { return candidates.at(best); }
};

/// Training/testing designs of one region: LHS from derive_seed(seed, 1) and (seed, 2).
/// Throws Error if the two designs share a point.
struct RegionDesigns {
  PointSet train;
  PointSet test;
  Vector train_q;
  Vector test_q;
};

RegionDesigns make_region_designs(const QoiModel& model, const ParameterSpace& region, const SurrogateOptions& options,
                                  std::uint64_t seed);

/// Fits every order on the designs projected through the first n columns of `subspace`
/// and keeps the AIC minimiser. Orders with too few training points are skipped.
SurrogateSelection build_and_select(const RegionDesigns& designs, const SubspaceResult& subspace, std::size_t n,
                                    SubspaceSource source, const SurrogateOptions& options);

SurrogateSelection build_and_select(const QoiModel& model, const ParameterSpace& region,
                                    const SubspaceResult& subspace, std::size_t n, SubspaceSource source,
                                    const SurrogateOptions& options, std::uint64_t seed);

struct ComparisonRow {
  std::size_t n = 0;
  SubspaceSource source = SubspaceSource::global;
  SurrogateSelection selection;
};

/// Global vs local surrogates for each n, trained and tested on the same points.
std::vector<ComparisonRow> compare_global_local(const QoiModel& model, const ParameterSpace& region,
                                                const SubspaceResult& global_subspace,
                                                const SubspaceResult& local_subspace,
                                                const std::vector<std::size_t>& dims, const SurrogateOptions& options,
                                                std::uint64_t seed);

}  // namespace activestab
