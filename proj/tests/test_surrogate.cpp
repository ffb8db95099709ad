// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "activestab/error.hpp"
#include "activestab/gradients.hpp"
#include "activestab/models.hpp"
#include "activestab/stability.hpp"
#include "activestab/surrogate.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace activestab;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

SubspaceResult identity_subspace(std::size_t m) {
  SubspaceResult s;
  s.eigenvalues = Vector::LinSpaced(static_cast<Eigen::Index>(m), static_cast<double>(m), 1.0);
  s.eigenvectors = Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  s.n = 1;
  return s;
}

}  // namespace

TEST_CASE("coefficient counts") {
  CHECK(coefficient_count(2, 2) == 6);
  CHECK(coefficient_count(3, 2) == 10);
  CHECK(coefficient_count(1, 2) == 3);
  CHECK(coefficient_count(5, 3) == 56);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int d = 0; d <= 3; ++d) {
      auto e = monomial_exponents(n, d);
      CHECK(e.size() == binomial(n + static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
      CHECK(coefficient_count(n, d) == e.size());
      std::set<std::vector<int>> unique(e.begin(), e.end());
      CHECK(unique.size() == e.size());
      int last_degree = 0;
      for (const auto& x : e) {
        CHECK(x.size() == n);
        int deg = 0;
        for (int p : x) {
          CHECK(p >= 0);
          deg += p;
        }
        CHECK(deg <= d);
        CHECK(deg >= last_degree);
        last_degree = deg;
      }
    }
  }
}

TEST_CASE("monomial basis order") {
  Vector y(2);
  y << 2.0, 3.0;
  auto b = monomial_basis(y, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 2.0);
  CHECK(b[2] == 3.0);
  CHECK(b[3] == 4.0);
  CHECK(b[4] == 6.0);
  CHECK(b[5] == 9.0);
}

TEST_CASE("exact polynomial data is interpolated") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  Matrix y(40, 2);
  Vector q(40);
  for (int i = 0; i < 40; ++i) {
    y(i, 0) = u(rng);
    y(i, 1) = u(rng);
    q[i] = 1.5 - y(i, 0) + 0.25 * y(i, 1) + 3.0 * y(i, 0) * y(i, 0) - 2.0 * y(i, 0) * y(i, 1) + 0.5 * y(i, 1) * y(i, 1);
  }
  auto s = fit_polynomial(y, q, 2);
  CHECK(s.train_rss <= 1e-18 * q.squaredNorm());
  for (int i = 0; i < 40; ++i) CHECK(s.predict(y.row(i).transpose()) == doctest::Approx(q[i]).epsilon(1e-9));
  CHECK(residual_sum_of_squares(s, y, q) == doctest::Approx(s.train_rss).epsilon(1e-6).scale(1e-12));

  auto c = fit_polynomial(y, Vector::Constant(40, 4.0), 3);
  CHECK(c.coefficients[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c.coefficients.tail(c.coefficients.size() - 1).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(fit_polynomial(y.topRows(5), q.head(5), 2), UnderdeterminedError);
  CHECK_THROWS_AS(fit_polynomial(y, q.head(5), 2), DimensionMismatchError);
}

TEST_CASE("least squares optimality") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  Matrix y(60, 3);
  Vector q(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) y(i, j) = n01(rng);
    q[i] = std::sin(y(i, 0)) + y(i, 1) * y(i, 2) + 0.1 * n01(rng);
  }
  auto s = fit_polynomial(y, q, 2);
  for (Eigen::Index k = 0; k < s.coefficients.size(); ++k) {
    for (double eps : {-1e-3, 1e-3}) {
      SurrogateModel p = s;
      p.coefficients[k] += eps;
      CHECK(residual_sum_of_squares(p, y, q) > s.train_rss);
    }
  }
}

TEST_CASE("AIC") {
  CHECK(aic(2.0, 3, 50) < aic(2.0, 4, 50));
  CHECK(aic(std::exp(1.0) * 2.0, 3, 50) - aic(2.0, 3, 50) == doctest::Approx(50.0));
  const double first = aic(1.0, 3, 100);
  const double second = aic(0.9, 10, 100);
  CHECK(first == doctest::Approx(oracle::aic(1.0, 3, 100)).epsilon(1e-14));
  CHECK(second == doctest::Approx(oracle::aic(0.9, 10, 100)).epsilon(1e-14));
  CHECK(first == doctest::Approx(-454.517).epsilon(1e-6));
  CHECK(first < second);
  CHECK_THROWS_AS(aic(1.0, 10, 10), InvalidArgumentError);
}

TEST_CASE("f1 is near-linear on a small region") {
  auto f1 = make_model("f1");
  ParameterSpace region({"x1", "x2"}, {0, 0}, {0.125, 0.125});
  auto design = lhs(200, region, 3);
  auto a = analyze_design(f1, region, design, nullptr, {}, 3);
  auto sel = build_and_select(f1, region, a.subspace, 1, SubspaceSource::local, {200, 200, AicBasis::test, {1}}, 5);
  const auto& s = sel.selected();
  CHECK(s.order == 1);
  CHECK(s.coefficients[1] > 0.0);
  const double mean = sel.test_actual.mean();
  const double tss = (sel.test_actual.array() - mean).square().sum();
  CHECK(1.0 - s.test_rss / tss > 0.99);
}

TEST_CASE("AIC picks the linear model for linear data") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.01);
  RegionDesigns d;
  d.train = lhs(300, ParameterSpace::unit(3), 1);
  d.test = lhs(300, ParameterSpace::unit(3), 2);
  d.train_q.resize(300);
  d.test_q.resize(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    d.train_q[i] = 2.0 * d.train(i, 0) + 1.0 + noise(rng);
    d.test_q[i] = 2.0 * d.test(i, 0) + 1.0 + noise(rng);
  }
  for (auto basis : {AicBasis::test, AicBasis::train}) {
    SurrogateOptions o{300, 300, basis, {1, 2, 3}};
    auto sel = build_and_select(d, identity_subspace(3), 1, SubspaceSource::global, o);
    REQUIRE(sel.candidates.size() == 3);
    CHECK(sel.selected().order == 1);
    CHECK(sel.rmse < 0.012);
  }
}

TEST_CASE("region designs") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 8), 0);
  SurrogateOptions o{60, 40, AicBasis::test, {1, 2}};
  auto d = make_region_designs(lv, region, o, 9);
  CHECK(d.train.rows() == 60);
  CHECK(d.test.rows() == 40);
  for (Eigen::Index i = 0; i < d.train.rows(); ++i) {
    CHECK(region.contains(row_span(d.train, i)));
    CHECK(d.train_q[i] == lv.evaluate(row_span(d.train, i)));
    for (Eigen::Index j = 0; j < d.test.rows(); ++j) CHECK(d.train.row(i) != d.test.row(j));
  }
  auto again = make_region_designs(lv, region, o, 9);
  CHECK(again.train == d.train);
  CHECK(again.test_q == d.test_q);
}

TEST_CASE("selection skips orders the design cannot support") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 8), 0);
  SurrogateOptions o{15, 15, AicBasis::test, {1, 2, 3}};
  auto sel = build_and_select(lv, region, identity_subspace(6), 3, SubspaceSource::global, o, 1);
  REQUIRE(sel.candidates.size() == 2);
  CHECK(sel.candidates.back().order == 2);
  SurrogateOptions tiny{5, 5, AicBasis::test, {2, 3}};
  CHECK_THROWS_AS(build_and_select(lv, region, identity_subspace(6), 3, SubspaceSource::global, tiny, 1),
                  UnderdeterminedError);
}

TEST_CASE("compare_global_local") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 8), 0);
  auto local = analyze_design(lv, region, lhs(10, region, 1), nullptr, {}, 1).subspace;
  SurrogateOptions o{80, 80, AicBasis::test, {1, 2}};
  const std::vector<std::size_t> dims{1, 2};
  auto a = compare_global_local(lv, region, local, local, dims, o, 3);
  REQUIRE(a.size() == 4);
  CHECK(a[0].source == SubspaceSource::global);
  CHECK(a[1].source == SubspaceSource::local);
  CHECK(a[0].selection.rmse == a[1].selection.rmse);
  CHECK(a[2].selection.test_predicted == a[3].selection.test_predicted);
  auto b = compare_global_local(lv, region, local, local, dims, o, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].selection.rmse == b[i].selection.rmse);
  CHECK_THROWS_AS(compare_global_local(lv, region, local, local, {6}, o, 3), InvalidArgumentError);
  CHECK_THROWS_AS(compare_global_local(lv, region, local, local, {0}, o, 3), InvalidArgumentError);
}
