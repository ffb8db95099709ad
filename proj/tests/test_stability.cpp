// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "activestab/error.hpp"
#include "activestab/models.hpp"
#include "activestab/parallel.hpp"
#include "activestab/stability.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace activestab;

namespace {

AnalysisOptions opts(std::size_t n = 1) {
  AnalysisOptions o;
  o.n = n;
  return o;
}

}  // namespace

TEST_CASE("analyze_region on f1") {
  auto f1 = make_model("f1");
  auto global = global_analysis(f1, f1.space, 2000, 1, std::size_t{1});
  auto grid = grid_partition(f1.space, 7);
  for (std::size_t i = 0; i < grid.total_regions; ++i) {
    auto a = analyze_region(f1, grid, i, {10, 3}, global.subspace, opts());
    CHECK(a.region_index == i);
    CHECK(a.ranking(Metric::activity) == Ranking{0, 1});
    CHECK(a.distance_to_global < 1e-3);
  }
}

TEST_CASE("a single-region grid with the global design has distance zero") {
  auto f3 = make_model("f3");
  auto global = global_analysis(f3, f3.space, 500, 4, std::size_t{1});
  auto design = lhs(500, f3.space, global_design_seed(4));
  auto a = analyze_design(f3, f3.space, design, &global.subspace, opts(), 4);
  CHECK(a.distance_to_global == 0.0);
  CHECK(sweep_collect(f3, grid_partition(f3.space, 1), {10, 4}, global.subspace, opts()).size() == 1);
}

TEST_CASE("f3 hot zone sits near the origin") {
  auto f3 = make_model("f3");
  auto global = global_analysis(f3, f3.space, 10000, 2, std::size_t{1});
  auto grid = grid_partition(f3.space, 20);
  const std::size_t near_origin[2] = {0, 0};
  const std::size_t far_corner[2] = {19, 19};
  auto hot = analyze_region(f3, grid, grid.region_index(near_origin), {10, 2}, global.subspace, opts());
  auto cold = analyze_region(f3, grid, grid.region_index(far_corner), {10, 2}, global.subspace, opts());
  CHECK(hot.distance_to_global > 0.5);
  CHECK(cold.distance_to_global < 0.3);
}

TEST_CASE("global_analysis picks n from the spectrum unless overridden") {
  auto f1 = make_model("f1");
  CHECK(global_analysis(f1, f1.space, 200, 1, std::nullopt).subspace.n == 1);
  CHECK(global_analysis(f1, f1.space, 200, 1, std::size_t{2}).subspace.n == 2);
  CHECK_THROWS_AS(analyze_region(f1, grid_partition(f1.space, 2), 0, {10, 1},
                                 global_analysis(f1, f1.space, 200, 1, std::nullopt).subspace, opts(3)),
                  RegionError);
}

TEST_CASE("sweep is deterministic, ordered, and independent of the worker count") {
  auto lv = make_model("lotka-volterra");
  auto global = global_analysis(lv, lv.space, 300, 5, std::size_t{4});
  auto grid = grid_partition(lv.space, 2);
  AnalysisOptions o = opts(4);
  o.with_morris = true;
  o.morris = {4, 4};
  o.with_sobol = true;
  o.sobol = {64};
  auto a = sweep_collect(lv, grid, {10, 9}, global.subspace, o);
  const int saved = worker_count();
  set_worker_count(1);
  auto b = sweep_collect(lv, grid, {10, 9}, global.subspace, o);
  set_worker_count(saved);
  REQUIRE(a.size() == grid.total_regions);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].region_index == i);
    CHECK(a[i].subspace.eigenvectors == b[i].subspace.eigenvectors);
    CHECK(a[i].distance_to_global == b[i].distance_to_global);
    CHECK(a[i].morris->mu_star == b[i].morris->mu_star);
    CHECK(a[i].sobol->total_effect == b[i].sobol->total_effect);
  }
}

TEST_CASE("sweep keeps going past failing regions") {
  auto bad = oracle::function2d([](double a, double b) {
    return a > 0.75 ? std::nan("") : std::exp(0.7 * a + 0.3 * b);
  });
  auto global = global_analysis(make_model("f1"), bad.space, 100, 1, std::size_t{1});
  auto grid = grid_partition(bad.space, 4);
  std::vector<std::size_t> seen;
  auto s = sweep(bad, grid, {5, 1}, global.subspace, opts(), {},
                 [&](const LocalAnalysis& a) { seen.push_back(a.region_index); });
  CHECK(s.succeeded == 12);
  CHECK(s.failures.size() == 4);
  CHECK(seen.size() == 12);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  for (const auto& f : s.failures) CHECK(grid.multi_index(f.region_index)[0] == 3);

  const std::size_t subset[3] = {5, 1, 9};
  seen.clear();
  sweep(bad, grid, {5, 1}, global.subspace, opts(), subset, [&](const LocalAnalysis& a) { seen.push_back(a.region_index); });
  CHECK(seen == std::vector<std::size_t>{5, 1, 9});
}

TEST_CASE("census") {
  std::vector<Ranking> same(5, Ranking{1, 0, 2});
  auto c = census(same, Ranking{1, 0, 2});
  CHECK(c.unique_count() == 1);
  CHECK(c.total == 5);
  CHECK(c.global_ranking_position == 1);
  CHECK(c.global_ranking_frequency == 5);

  std::vector<Ranking> mixed{{0, 1, 2}, {1, 0, 2}, {1, 0, 2}, {2, 1, 0}, {1, 0, 2}, {0, 1, 2}};
  auto d = census(mixed, Ranking{0, 1, 2});
  CHECK(d.unique_count() == 3);
  auto top = d.top(10);
  REQUIRE(top.size() == 3);
  CHECK(top[0].first == Ranking{1, 0, 2});
  CHECK(top[0].second == 3);
  CHECK(top[1].second == 2);
  std::size_t sum = 0;
  for (const auto& [r, n] : top) sum += n;
  CHECK(sum == d.total);
  CHECK(d.global_ranking_position == 2);
  CHECK(census(mixed, Ranking{2, 0, 1}).global_ranking_frequency == 0);
}

TEST_CASE("top-k membership") {
  std::vector<Ranking> r{{0, 1, 2}, {1, 0, 2}, {1, 2, 0}, {1, 0, 2}};
  auto t1 = topk_membership(r, 3, 1);
  CHECK(t1[0] == doctest::Approx(25.0));
  CHECK(t1[1] == doctest::Approx(75.0));
  CHECK(t1[2] == 0.0);
  CHECK(t1.sum() == doctest::Approx(100.0));
  CHECK(topk_membership(r, 3, 2).sum() == doctest::Approx(200.0));
  CHECK(topk_membership(r, 3, 3) == Vector::Constant(3, 100.0));
  CHECK_THROWS_AS(topk_membership(r, 3, 0), InvalidArgumentError);
  CHECK_THROWS_AS(topk_membership(r, 3, 4), InvalidArgumentError);

  auto f1 = make_model("f1");
  auto global = global_analysis(f1, f1.space, 500, 1, std::size_t{1});
  auto grid = grid_partition(f1.space, 6);
  auto all = sweep_collect(f1, grid, {10, 1}, global.subspace, opts());
  std::vector<Ranking> rr;
  for (const auto& a : all) rr.push_back(a.ranking(Metric::activity));
  auto t = topk_membership(rr, 2, 1);
  CHECK(t[0] == 100.0);
  CHECK(t[1] == 0.0);
}

TEST_CASE("distance map") {
  auto f1 = make_model("f1");
  auto global = global_analysis(f1, f1.space, 500, 1, std::size_t{1});
  auto grid = grid_partition(f1.space, 5);
  auto all = sweep_collect(f1, grid, {10, 3}, global.subspace, opts());
  auto map = distance_map(all, grid);
  CHECK(map.mean.rows() == 5);
  CHECK(map.mean.cols() == 2);
  CHECK(map.mean.maxCoeff() < 1e-3);
  CHECK((map.counts.array() == 5).all());

  std::vector<RegionDistance> d;
  for (std::size_t i = 0; i < grid.total_regions; ++i) d.push_back({i, static_cast<double>(grid.multi_index(i)[0])});
  auto m2 = distance_map(d, grid);
  for (Eigen::Index b = 0; b < 5; ++b) {
    CHECK(m2.mean(b, 0) == doctest::Approx(static_cast<double>(b)));
    CHECK(m2.mean(b, 1) == doctest::Approx(2.0));
  }

  SweepAggregator agg(grid, {Metric::activity});
  for (const auto& a : all) agg.add(a);
  CHECK(agg.distance_map().mean == map.mean);
  CHECK(agg.rankings(Metric::activity).size() == all.size());
  CHECK_THROWS_AS(agg.rankings(Metric::sobol), InvalidArgumentError);
}

TEST_CASE("restricted eigenstudy") {
  auto f3 = make_model("f3");
  std::vector<EigenScenario> full{{"full", f3.space}};
  auto r = restricted_eigenstudy(f3, full, 400, 12);
  auto g = global_analysis(f3, f3.space, 400, 12, std::size_t{1});
  REQUIRE(r.size() == 1);
  CHECK(r[0].eigenvalues == g.subspace.eigenvalues);
  CHECK(r[0].scores.raw == g.scores.raw);
  CHECK(r[0].w1_squared.sum() == doctest::Approx(1.0));

  auto lv = make_model("lotka-volterra");
  auto sc = growth_scenarios(lv.space, 0.125);
  REQUIRE(sc.size() == 3);
  CHECK(sc[0].box.upper[0] == 0.125);
  CHECK(sc[0].box.upper[1] == 0.125);
  CHECK(sc[0].box.upper[2] == 1.0);
  CHECK(sc[1].box.lower[1] == 0.125);
  CHECK(sc[2].box == lv.space);
  CHECK_THROWS_AS(growth_scenarios(lv.space, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(growth_scenarios(lv.space, 0.5, 0, 9), InvalidArgumentError);
}

TEST_CASE("small-growth LV scenario is dominated by the growth rates") {
  auto lv = make_model("lotka-volterra");
  auto sc = growth_scenarios(lv.space, 0.125);
  auto r = restricted_eigenstudy(lv, std::span(sc).first(1), 2000, 3);
  Eigen::Index top1, top2;
  r[0].w1_squared.maxCoeff(&top1);
  r[0].w2_squared.maxCoeff(&top2);
  CHECK(top1 == 0);
  CHECK(top2 == 1);
}

TEST_CASE("f3 x1-first count is stable in the per-cell sample size") {
  auto f3 = make_model("f3");
  auto global = global_analysis(f3, f3.space, 10000, 1, std::size_t{1});
  auto grid = grid_partition(f3.space, 100);
  auto count = [&](std::size_t samples) {
    std::size_t n = 0;
    sweep(f3, grid, {samples, 1}, global.subspace, opts(), {},
          [&](const LocalAnalysis& a) { n += a.ranking(Metric::activity)[0] == 0; });
    return n;
  };
  const auto c10 = count(10);
  const auto c40 = count(40);
  CHECK(c10 > 1900);
  CHECK(c10 < 2500);
  CHECK(std::abs(static_cast<double>(c10) - static_cast<double>(c40)) < 300.0);
}
