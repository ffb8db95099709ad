// SPDX-License-Identifier: Apache-2.0
#include "activestab/surrogate.hpp"

#include "activestab/error.hpp"
#include "activestab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace activestab {

const char* source_name(SubspaceSource source) { return source == SubspaceSource::global ? "global" : "local"; }

namespace {

// Exponent vectors of total degree exactly `degree`, lexicographically descending.
void exponents_of_degree(std::size_t n, int degree, std::size_t axis, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  if (axis + 1 == n) {
    current[axis] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[axis] = e;
    exponents_of_degree(n, degree - e, axis + 1, current, out);
  }
}

Matrix design_matrix(const Matrix& standardized, int d, const std::vector<std::vector<int>>& exps) {
  Matrix phi(standardized.rows(), static_cast<Eigen::Index>(exps.size()));
  for (Eigen::Index r = 0; r < standardized.rows(); ++r) {
    for (std::size_t t = 0; t < exps.size(); ++t) {
      double v = 1.0;
      for (std::size_t j = 0; j < exps[t].size(); ++j)
        for (int p = 0; p < exps[t][j]; ++p) v *= standardized(r, static_cast<Eigen::Index>(j));
      phi(r, static_cast<Eigen::Index>(t)) = v;
    }
  }
  (void)d;
  return phi;
}

Matrix standardize_rows(const Standardizer& s, const Matrix& active) {
  Matrix out = active;
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = s.apply(active.row(r).transpose()).transpose();
  return out;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(std::size_t n, int d) {
  if (n == 0) throw InvalidArgumentError("monomial basis needs at least one variable");
  if (d < 0) throw InvalidArgumentError("polynomial order must be nonnegative");
  std::vector<std::vector<int>> out;
  std::vector<int> current(n, 0);
  for (int degree = 0; degree <= d; ++degree) exponents_of_degree(n, degree, 0, current, out);
  return out;
}

std::size_t coefficient_count(std::size_t n, int d) {
  // C(n + d, d) built incrementally; exact for the sizes used here.
  std::size_t c = 1;
  for (int i = 1; i <= d; ++i) c = c * (n + static_cast<std::size_t>(i)) / static_cast<std::size_t>(i);
  return c;
}

Vector monomial_basis(const Vector& y, int d) {
  const auto exps = monomial_exponents(static_cast<std::size_t>(y.size()), d);
  return design_matrix(y.transpose(), d, exps).row(0).transpose();
}

double SurrogateModel::predict(const Vector& y) const {
  return monomial_basis(standardizer.apply(y), order).dot(coefficients);
}

SurrogateModel fit_polynomial(const Matrix& active, const Vector& q, int d) {
  const auto n = static_cast<std::size_t>(active.cols());
  if (active.rows() != q.size()) throw DimensionMismatchError("fit_polynomial: point and value counts differ");
  const auto exps = monomial_exponents(n, d);
  if (static_cast<std::size_t>(active.rows()) < exps.size())
    throw UnderdeterminedError("fit_polynomial: " + std::to_string(active.rows()) + " points for " +
                               std::to_string(exps.size()) + " coefficients");

  SurrogateModel s;
  s.n = n;
  s.order = d;
  s.standardizer.mean = active.colwise().mean().transpose();
  s.standardizer.scale.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    const double sd = std::sqrt((active.col(j).array() - s.standardizer.mean[j]).square().mean());
    s.standardizer.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  const Matrix phi = design_matrix(standardize_rows(s.standardizer, active), d, exps);
  s.coefficients = phi.completeOrthogonalDecomposition().solve(q);
  s.train_rss = (phi * s.coefficients - q).squaredNorm();
  return s;
}

double residual_sum_of_squares(const SurrogateModel& model, const Matrix& active, const Vector& q) {
  const auto exps = monomial_exponents(model.n, model.order);
  const Matrix phi = design_matrix(standardize_rows(model.standardizer, active), model.order, exps);
  return (phi * model.coefficients - q).squaredNorm();
}

double aic(double rss, std::size_t n_params, std::size_t n_points) {
  if (n_points <= n_params) throw InvalidArgumentError("AIC needs more points than parameters");
  const double N = static_cast<double>(n_points);
  return N * std::log(std::max(rss, 1e-30) / N) + 2.0 * static_cast<double>(n_params);
}

RegionDesigns make_region_designs(const QoiModel& model, const ParameterSpace& region, const SurrogateOptions& options,
                                  std::uint64_t seed) {
  RegionDesigns d;
  d.train = lhs(options.train_count, region, derive_seed(seed, 1));
  d.test = lhs(options.test_count, region, derive_seed(seed, 2));
  std::set<std::vector<double>> seen;
  for (Eigen::Index r = 0; r < d.train.rows(); ++r) {
    auto p = row_span(d.train, r);
    seen.emplace(p.begin(), p.end());
  }
  for (Eigen::Index r = 0; r < d.test.rows(); ++r) {
    auto p = row_span(d.test, r);
    if (seen.count(std::vector<double>(p.begin(), p.end())))
      throw Error("training and testing designs share a point");
  }
  d.train_q.resize(d.train.rows());
  d.test_q.resize(d.test.rows());
  evaluate_parallel(model, d.train, std::span<double>(d.train_q.data(), static_cast<std::size_t>(d.train_q.size())));
  evaluate_parallel(model, d.test, std::span<double>(d.test_q.data(), static_cast<std::size_t>(d.test_q.size())));
  return d;
}

SurrogateSelection build_and_select(const RegionDesigns& designs, const SubspaceResult& subspace, std::size_t n,
                                    SubspaceSource source, const SurrogateOptions& options) {
  const Matrix w1 = subspace.with_dimension(n).W1();
  const Matrix train_y = Matrix(designs.train) * w1;
  const Matrix test_y = Matrix(designs.test) * w1;

  SurrogateSelection sel;
  for (int d : options.orders) {
    if (static_cast<std::size_t>(train_y.rows()) < coefficient_count(n, d)) continue;
    SurrogateModel s = fit_polynomial(train_y, designs.train_q, d);
    s.source = source;
    s.test_rss = residual_sum_of_squares(s, test_y, designs.test_q);
    const bool on_test = options.aic_basis == AicBasis::test;
    const std::size_t points = static_cast<std::size_t>(on_test ? test_y.rows() : train_y.rows());
    if (points <= static_cast<std::size_t>(s.coefficients.size())) continue;
    s.aic = aic(on_test ? s.test_rss : s.train_rss, static_cast<std::size_t>(s.coefficients.size()), points);
    sel.candidates.push_back(std::move(s));
  }
  if (sel.candidates.empty()) throw UnderdeterminedError("no polynomial order could be fitted with these designs");
  for (std::size_t i = 1; i < sel.candidates.size(); ++i)
    if (sel.candidates[i].aic < sel.candidates[sel.best].aic) sel.best = i;

  const SurrogateModel& best = sel.selected();
  sel.test_actual = designs.test_q;
  sel.test_predicted.resize(test_y.rows());
  for (Eigen::Index r = 0; r < test_y.rows(); ++r) sel.test_predicted[r] = best.predict(test_y.row(r).transpose());
  sel.rmse = std::sqrt((sel.test_predicted - sel.test_actual).squaredNorm() / static_cast<double>(test_y.rows()));
  return sel;
}

SurrogateSelection build_and_select(const QoiModel& model, const ParameterSpace& region,
                                    const SubspaceResult& subspace, std::size_t n, SubspaceSource source,
                                    const SurrogateOptions& options, std::uint64_t seed) {
  return build_and_select(make_region_designs(model, region, options, seed), subspace, n, source, options);
}

std::vector<ComparisonRow> compare_global_local(const QoiModel& model, const ParameterSpace& region,
                                                const SubspaceResult& global_subspace,
                                                const SubspaceResult& local_subspace,
                                                const std::vector<std::size_t>& dims, const SurrogateOptions& options,
                                                std::uint64_t seed) {
  const std::size_t m = global_subspace.dim();
  for (std::size_t n : dims)
    if (n < 1 || n >= m) throw InvalidArgumentError("surrogate dimensions must lie in [1, m-1]");
  const RegionDesigns designs = make_region_designs(model, region, options, seed);
  std::vector<ComparisonRow> rows;
  for (std::size_t n : dims) {
    rows.push_back({n, SubspaceSource::global,
                    build_and_select(designs, global_subspace, n, SubspaceSource::global, options)});
    rows.push_back({n, SubspaceSource::local,
                    build_and_select(designs, local_subspace, n, SubspaceSource::local, options)});
  }
  return rows;
}

}  // namespace activestab
