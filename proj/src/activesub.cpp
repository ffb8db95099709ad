// SPDX-License-Identifier: Apache-2.0
#include "activestab/activesub.hpp"

#include "activestab/error.hpp"
#include "activestab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace activestab {

namespace {

constexpr std::size_t kAccumulateChunk = 256;

Matrix accumulate_chunk(std::span<const GradientSample> samples, Eigen::Index m) {
  Matrix acc = Matrix::Zero(m, m);
  for (const auto& s : samples) acc.noalias() += s.g * s.g.transpose();
  return acc;
}

void check_orthonormal(const Matrix& w, const char* which) {
  const Matrix gram = w.transpose() * w;
  const double err = (gram - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-8)
    throw InvalidArgumentError(std::string("subspace_distance: ") + which + " does not have orthonormal columns");
}

}  // namespace

SubspaceResult SubspaceResult::with_dimension(std::size_t active) const {
  if (active < 1 || active > dim())
    throw InvalidArgumentError("active dimension must lie in [1, " + std::to_string(dim()) + "]");
  SubspaceResult out = *this;
  out.n = active;
  return out;
}

CMatrix estimate_c(std::span<const GradientSample> samples) {
  if (samples.empty()) throw InvalidArgumentError("estimate_c needs at least one gradient sample");
  const Eigen::Index m = samples.front().g.size();
  for (const auto& s : samples)
    if (s.g.size() != m) throw DimensionMismatchError("estimate_c: gradient samples differ in length");

  const std::size_t chunks = (samples.size() + kAccumulateChunk - 1) / kAccumulateChunk;
  std::vector<Matrix> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kAccumulateChunk;
    const std::size_t count = std::min(kAccumulateChunk, samples.size() - begin);
    partial[static_cast<std::size_t>(c)] = accumulate_chunk(samples.subspan(begin, count), m);
  }
  // Pairwise tree in fixed order.
  for (std::size_t stride = 1; stride < chunks; stride *= 2)
    for (std::size_t i = 0; i + stride < chunks; i += 2 * stride) partial[i] += partial[i + stride];

  Matrix c = partial.front() / static_cast<double>(samples.size());
  return {0.5 * (c + c.transpose()), samples.size()};
}

SubspaceResult eigendecompose(const CMatrix& c) {
  const Eigen::Index m = c.entries.rows();
  if (m == 0 || c.entries.cols() != m) throw DimensionMismatchError("eigendecompose: C must be square");
  const SymmetricEigen eig = jacobi_eigen(c.entries);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eig.values[a] > eig.values[b]; });

  SubspaceResult out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    out.eigenvalues[j] = eig.values[order[static_cast<std::size_t>(j)]];
    Vector w = eig.vectors.col(order[static_cast<std::size_t>(j)]);
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < m; ++i)
      if (std::abs(w[i]) > std::abs(w[big])) big = i;
    if (w[big] < 0.0) w = -w;
    out.eigenvectors.col(j) = w;
  }
  const double floor = -1e-10 * std::max(out.eigenvalues[0], 0.0);
  for (Eigen::Index j = 0; j < m; ++j)
    if (out.eigenvalues[j] < 0.0 && out.eigenvalues[j] >= floor) out.eigenvalues[j] = 0.0;
  return out;
}

std::size_t select_dimension(const Vector& eigenvalues) {
  const Eigen::Index m = eigenvalues.size();
  if (m == 0) throw InvalidArgumentError("select_dimension: empty spectrum");
  const double top = eigenvalues[0];
  if (!(top > 0.0)) throw DegenerateSpectrumError("all eigenvalues are zero; no active subspace");
  if (m == 1) return 1;
  const double floor = 1e-14 * top;
  std::size_t best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    const double a = std::max(eigenvalues[j], floor);
    const double b = std::max(eigenvalues[j + 1], floor);
    const double gap = std::log10(a / b);
    if (gap > best_gap) {
      best_gap = gap;
      best = static_cast<std::size_t>(j + 1);
    }
  }
  return best;
}

Ranking rank_descending(const Vector& scores) {
  Ranking r(static_cast<std::size_t>(scores.size()));
  std::iota(r.begin(), r.end(), std::size_t{0});
  std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
  });
  return r;
}

ActivityScores activity_scores(const SubspaceResult& subspace) {
  const Eigen::Index m = subspace.eigenvalues.size();
  ActivityScores s;
  s.raw = Vector::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double a = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double w = subspace.eigenvectors(i, j);
      a += subspace.eigenvalues[j] * w * w;
    }
    s.raw[i] = std::max(a, 0.0);
  }
  const double top = s.raw.maxCoeff();
  s.normalized = top > 0.0 ? Vector(s.raw / top) : Vector(Vector::Zero(m));
  s.ranking = rank_descending(s.raw);
  return s;
}

double subspace_distance(const Matrix& a, const Matrix& b, DistanceNorm norm) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatchError("subspace_distance: shapes differ");
  check_orthonormal(a, "first argument");
  check_orthonormal(b, "second argument");
  const Matrix diff = a * a.transpose() - b * b.transpose();
  const double d = norm == DistanceNorm::spectral ? spectral_norm_symmetric(diff) : diff.norm();
  return norm == DistanceNorm::spectral ? std::clamp(d, 0.0, 1.0) : d;
}

ActiveVars project(const Vector& x, const SubspaceResult& subspace) {
  if (static_cast<std::size_t>(x.size()) != subspace.dim())
    throw DimensionMismatchError("project: point dimension does not match subspace");
  return {subspace.W1().transpose() * x, subspace.W2().transpose() * x};
}

}  // namespace activestab
