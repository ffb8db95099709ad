// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "activestab/error.hpp"
#include "activestab/gradients.hpp"
#include "activestab/models.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace activestab;

TEST_CASE("affine functions are recovered exactly") {
  auto m = oracle::affine({2.0, -1.5, 0.25}, 3.0);
  const double x[3] = {0.3, 0.6, 0.9};
  for (double h : {1e-5, 1e-3, 0.05}) {
    auto g = central_diff(m, m.space, x, h);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(g[1] == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(g[2] == doctest::Approx(0.25).epsilon(1e-9));
  }
  // Non-unit box: the gradient is with respect to unit-scaled coordinates.
  ParameterSpace box({"a", "b", "c"}, {0, -1, 10}, {2, 1, 14});
  const double y[3] = {1.0, 0.0, 12.0};
  auto g = central_diff(m, box, y);
  CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("central differences on f1 and a quadratic") {
  auto f1 = make_model("f1");
  const double x[2] = {0.5, 0.5};
  auto g = central_diff(f1, f1.space, x, 1e-5);
  CHECK(std::abs(g[0] - 0.7 * std::exp(0.5)) < 1e-8);
  CHECK(std::abs(g[1] - 0.3 * std::exp(0.5)) < 1e-8);

  auto sq = oracle::function2d([](double a, double) { return a * a; });
  const double p[2] = {0.3, 0.5};
  CHECK(central_diff(sq, sq.space, p)[0] == doctest::Approx(0.6).epsilon(1e-9));
  // One-sided stencils at the box faces are exact on quadratics too.
  const double lo[2] = {0.0, 0.5};
  const double hi[2] = {1.0, 0.5};
  CHECK(std::abs(central_diff(sq, sq.space, lo)[0]) < 1e-9);
  CHECK(central_diff(sq, sq.space, hi)[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("finite differences agree with analytic gradients") {
  for (const char* name : {"f1", "f2", "f3"}) {
    auto m = make_model(name);
    auto pts = lhs(1000, m.space, 8);
    auto fd = gradient_batch(m, m.space, pts);
    auto an = gradient_batch(m, m.space, pts, {GradientMode::analytic});
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) worst = std::max(worst, (fd[i].g - an[i].g).cwiseAbs().maxCoeff());
    CHECK_MESSAGE(worst < 1e-6, name << " worst " << worst);
  }
}

TEST_CASE("gradient_batch bookkeeping") {
  auto f2 = make_model("f2");
  PointSet none(0, 2);
  CHECK(gradient_batch(f2, f2.space, none).empty());

  auto pts = lhs(64, f2.space, 3);
  auto out = gradient_batch(f2, f2.space, pts, {GradientMode::finite_difference, kDefaultFdStep, true});
  REQUIRE(out.size() == 64);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].x == pts.row(static_cast<Eigen::Index>(i)).transpose());
    REQUIRE(out[i].f_center.has_value());
    CHECK(*out[i].f_center == f2.evaluate(row_span(pts, static_cast<Eigen::Index>(i))));
  }
  CHECK_THROWS_AS(gradient_batch(make_model("lotka-volterra"), ParameterSpace::unit(6), lhs(2, ParameterSpace::unit(6), 1),
                                 {GradientMode::analytic}),
                  GradientBatchError);
}

TEST_CASE("interior finite differences cost 2m evaluations") {
  auto c = oracle::counted(make_model("lotka-volterra"));
  ParameterSpace box = c.model.space;
  auto inner = region_bounds(grid_partition(box, 4), 1000);
  auto pts = lhs(25, inner, 2);
  gradient_batch(c.model, inner, pts);
  CHECK(c.calls->load() == 25 * 12);
}

TEST_CASE("non-finite outputs are reported") {
  auto bad = oracle::function2d([](double a, double b) {
    return a > 0.5 ? std::numeric_limits<double>::quiet_NaN() : a + b;
  });
  const double x[2] = {0.5, 0.2};
  try {
    central_diff(bad, bad.space, x);
    FAIL("expected GradientEvaluationError");
  } catch (const GradientEvaluationError& e) {
    REQUIRE(e.stencil_point().size() == 2);
    CHECK(e.stencil_point()[0] > 0.5);
  }

  PointSet pts(3, 2);
  pts << 0.1, 0.1, 0.9, 0.2, 0.3, 0.3;
  try {
    gradient_batch(bad, bad.space, pts);
    FAIL("expected GradientBatchError");
  } catch (const GradientBatchError& e) {
    REQUIRE(e.failures().size() == 1);
    CHECK(e.failures()[0].index == 1);
  }
  CHECK_THROWS_AS(central_diff(bad, bad.space, std::vector<double>{0.1}), DimensionMismatchError);
  CHECK_THROWS_AS(central_diff(bad, bad.space, std::vector<double>{0.1, 0.1}, 0.0), InvalidArgumentError);
}
