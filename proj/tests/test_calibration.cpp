// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "activestab/calibration.hpp"
#include "activestab/error.hpp"
#include "activestab/models.hpp"
#include "oracles.hpp"

#include <cmath>
#include <set>

using namespace activestab;

namespace {

const Ranking kLvGlobal{0, 2, 3, 1, 4, 5};

McmcOptions short_run(std::size_t iterations = 600) {
  McmcOptions o;
  o.iterations = iterations;
  o.burn_in = iterations / 5;
  o.adapt_start = std::min<std::size_t>(200, iterations / 2);
  return o;
}

}  // namespace

TEST_CASE("adaptive Metropolis recovers a correlated Gaussian") {
  Vector mu(2);
  mu << 0.5, 0.45;
  Matrix cov(2, 2);
  cov << 0.05 * 0.05, 0.6 * 0.05 * 0.03, 0.6 * 0.05 * 0.03, 0.03 * 0.03;
  const Matrix prec = cov.inverse();
  auto logd = [&](const Vector& x) {
    const Vector d = x - mu;
    return -0.5 * d.dot(prec * d);
  };
  McmcOptions o;
  o.iterations = 100000;
  o.burn_in = 5000;
  auto chain = run_chain(Vector::Constant(2, 0.5), logd, o, 2024);
  const auto& s = chain.samples();
  REQUIRE(s.size() == 95000);
  Vector mean = Vector::Zero(2);
  for (const auto& x : s) mean += x;
  mean /= static_cast<double>(s.size());
  Matrix c = Matrix::Zero(2, 2);
  for (const auto& x : s) c += (x - mean) * (x - mean).transpose();
  c /= static_cast<double>(s.size() - 1);
  CHECK(mean[0] == doctest::Approx(mu[0]).epsilon(0.05));
  CHECK(mean[1] == doctest::Approx(mu[1]).epsilon(0.05));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(c(i, j) == doctest::Approx(cov(i, j)).epsilon(0.05));
  CHECK(chain.acceptance_rate() > 0.2);
  CHECK(chain.acceptance_rate() < 0.95);
}

TEST_CASE("flat likelihood accepts every in-box proposal") {
  McmcOptions o;
  o.iterations = 4000;
  o.burn_in = 100;
  o.initial_scale = 0.001;
  o.adapt_start = o.iterations;
  auto chain = run_chain(Vector::Constant(3, 0.5), [](const Vector&) { return 0.0; }, o, 1);
  CHECK(chain.acceptance_rate() == 1.0);

  CalibrationOptions co;
  co.mcmc = short_run(1000);
  co.noise_rel = 1e12;
  auto lv = make_model("lotka-volterra");
  auto task = make_task(lv, 0, lv.space, 2, kLvGlobal, 5);
  CHECK(calibrate(lv, task, co, 3).acceptance_rate > 0.6);
}

TEST_CASE("the best state only improves and dominates the chain") {
  auto logd = [](const Vector& x) { return -std::pow((x.array() - 0.3).square().sum(), 0.5) * 40.0; };
  McmcOptions o = short_run(3000);
  AdaptiveMetropolis chain(Vector::Constant(2, 0.9), logd(Vector::Constant(2, 0.9)), o, 77);
  Vector u;
  double best = chain.best_log_density();
  while (chain.next_request(u)) {
    chain.submit(logd(u));
    CHECK(chain.best_log_density() >= best);
    best = chain.best_log_density();
    CHECK(chain.current_log_density() <= best);
  }
  CHECK(chain.iteration() == 3000);
  for (const auto& s : chain.samples()) CHECK(logd(s) <= best);
}

TEST_CASE("chain options are validated") {
  McmcOptions o;
  o.burn_in = o.iterations;
  CHECK_THROWS_AS(o.validate(), InvalidArgumentError);
  McmcOptions p;
  p.dr_scale = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
  CalibrationOptions c;
  c.noise_rel = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
  AdaptiveMetropolis chain(Vector::Constant(1, 0.5), 0.0, McmcOptions{}, 1);
  CHECK_THROWS_AS(chain.submit(0.0), Error);
}

TEST_CASE("make_task") {
  auto lv = make_model("lotka-volterra");
  auto grid = grid_partition(lv.space, 4);
  auto region = region_bounds(grid, 77);
  auto t = make_task(lv, 77, region, 1, kLvGlobal, 9);
  CHECK(t.free_subset == std::vector<std::size_t>{0});
  CHECK(t.k == 1);
  CHECK(region.contains(as_span(t.true_params)));
  CHECK(t.data_qoi == lv.evaluate(as_span(t.true_params)));
  CHECK(t.fixed_values == Vector::Constant(6, 0.5));
  auto again = make_task(lv, 77, region, 1, kLvGlobal, 9);
  CHECK(again.true_params == t.true_params);
  auto full = make_task(lv, 77, region, 6, kLvGlobal, 9);
  CHECK(std::set<std::size_t>(full.free_subset.begin(), full.free_subset.end()).size() == 6);
  CHECK(full.true_params == t.true_params);
  CHECK_THROWS_AS(make_task(lv, 77, region, 0, kLvGlobal, 9), InvalidArgumentError);
  CHECK_THROWS_AS(make_task(lv, 77, region, 7, kLvGlobal, 9), InvalidArgumentError);
}

TEST_CASE("an identifiable scalar problem is solved") {
  auto lv = make_model("lotka-volterra");
  auto task = make_task(lv, 0, region_bounds(grid_partition(lv.space, 2), 0), 1, kLvGlobal, 21);
  task.fixed_values = task.true_params;
  CalibrationOptions o;
  o.noise_rel = 1e-3;
  auto r = calibrate(lv, task, o, 4);
  CHECK(r.fit_error < 1e-8);
  CHECK(r.failed_evaluations == 0);
  CHECK(r.samples.size() == o.mcmc.iterations - o.mcmc.burn_in);
}

TEST_CASE("chains are deterministic and batching does not change them") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 4), 1234);
  CalibrationOptions o;
  o.mcmc = short_run();
  std::vector<CalibrationTask> tasks;
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 1; k <= 4; ++k) {
    tasks.push_back(make_task(lv, 1234, region, k, kLvGlobal, 6));
    seeds.push_back(100 + k);
  }
  auto many = calibrate_many(lv, tasks, seeds, o);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto one = calibrate(lv, tasks[i], o, seeds[i]);
    CHECK(one.fit_error == many[i].fit_error);
    CHECK(one.best_fit == many[i].best_fit);
    REQUIRE(one.samples.size() == many[i].samples.size());
    for (std::size_t s = 0; s < one.samples.size(); ++s) CHECK(one.samples[s] == many[i].samples[s]);
    CHECK(calibrate(lv, tasks[i], o, seeds[i]).acceptance_rate == one.acceptance_rate);
  }
}

TEST_CASE("best fit is no worse than any stored state") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 4), 3000);
  auto task = make_task(lv, 3000, region, 2, kLvGlobal, 8);
  CalibrationOptions o;
  o.mcmc = short_run(800);
  auto r = calibrate(lv, task, o, 5);
  CHECK(r.fit_error >= 0.0);
  for (std::size_t i = 0; i < r.samples.size(); i += 7) {
    Vector full = task.fixed_values;
    for (std::size_t j = 0; j < task.free_subset.size(); ++j)
      full[static_cast<Eigen::Index>(task.free_subset[j])] = r.samples[i][static_cast<Eigen::Index>(j)];
    const double e = task.data_qoi - lv.evaluate(as_span(full));
    CHECK(r.fit_error <= e * e);
  }
}

TEST_CASE("set-equal subsets tie exactly") {
  auto lv = make_model("lotka-volterra");
  auto region = region_bounds(grid_partition(lv.space, 4), 500);
  CalibrationOptions o;
  o.mcmc = short_run();
  Ranking local{2, 0, 1, 3, 5, 4};
  auto c = compare_subsets(lv, 500, region, 2, kLvGlobal, local, o, 3);
  CHECK(c.winner == Winner::tie);
  CHECK(c.difference() == 0.0);

  // Paired chains: the permuted task runs the identical chain.
  auto t = make_task(lv, 500, region, 3, kLvGlobal, 3);
  auto u = t;
  u.free_subset = {3, 0, 2};
  auto a = calibrate(lv, t, o, 11);
  auto b = calibrate(lv, u, o, 11);
  CHECK(a.fit_error == b.fit_error);
  CHECK(a.best_fit[0] == b.best_fit[1]);

  auto full = compare_subsets(lv, 500, region, 6, kLvGlobal, Ranking{5, 4, 3, 2, 1, 0}, o, 3);
  CHECK(full.winner == Winner::tie);
}

TEST_CASE("judge") {
  SubsetComparison c;
  c.global_subset = {0};
  c.local_subset = {2};
  c.data_qoi = 10.0;
  c.global_error = 1.0;
  c.local_error = 0.5;
  CHECK(judge(c, 0.0) == Winner::local);
  c.local_error = 2.0;
  CHECK(judge(c, 0.0) == Winner::global);
  c.local_error = 1.0 + 0.5 * (1e-3 * 10.0) * (1e-3 * 10.0);
  CHECK(judge(c, 1e-3) == Winner::tie);
  CHECK(judge(c, 0.0) == Winner::global);
  c.local_subset = {0};
  c.local_error = 100.0;
  CHECK(judge(c, 0.0) == Winner::tie);
  CHECK(std::string(winner_name(Winner::local)) == "local");
}

TEST_CASE("experiment sweep") {
  auto lv = make_model("lotka-volterra");
  auto grid = grid_partition(lv.space, 4);
  auto picks = subsample_regions(grid.total_regions, 6, 2);
  std::vector<RegionRanking> regions;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    Ranking r = kLvGlobal;
    std::rotate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(i % 6), r.end());
    regions.push_back({picks[i], r});
  }
  regions.push_back({picks[0], Ranking{0, 1}});
  CalibrationOptions o;
  o.mcmc = short_run(300);
  const std::size_t ks[3] = {1, 3, 6};
  auto ex = experiment_sweep(lv, grid, regions, kLvGlobal, ks, o, 13);
  CHECK(ex.failures.size() == 3);
  REQUIRE(ex.rates.size() == 3);
  CHECK(ex.rates[2].ties == 6);
  CHECK(ex.rates[2].percent(ex.rates[2].ties) == 100.0);
  CHECK(ex.comparisons.size() == 18);
  CHECK(ex.rates[0].total() == 6);

  auto again = experiment_sweep(lv, grid, regions, kLvGlobal, ks, o, 13);
  REQUIRE(again.comparisons.size() == ex.comparisons.size());
  for (std::size_t i = 0; i < ex.comparisons.size(); ++i) {
    CHECK(again.comparisons[i].global_error == ex.comparisons[i].global_error);
    CHECK(again.comparisons[i].local_error == ex.comparisons[i].local_error);
  }
  // The sweep and the one-off comparison agree.
  const auto& first = ex.comparisons[3];
  REQUIRE(first.region_index == regions[1].region_index);
  auto one = compare_subsets(lv, first.region_index, region_bounds(grid, first.region_index), first.k, kLvGlobal,
                             regions[1].local, o, derive_seed(13, first.region_index));
  CHECK(one.global_error == first.global_error);
  CHECK(one.local_error == first.local_error);

  const std::size_t bad_k[1] = {7};
  CHECK_THROWS_AS(experiment_sweep(lv, grid, regions, kLvGlobal, bad_k, o, 13), InvalidArgumentError);
}

TEST_CASE("model failures become rejections") {
  auto m = oracle::function2d([](double a, double b) { return a + b > 1.0 ? std::nan("") : 1.0 + a + 2.0 * b; });
  CalibrationTask t;
  t.true_params = (Vector(2) << 0.2, 0.3).finished();
  t.data_qoi = 1.8;
  t.k = 2;
  t.free_subset = {0, 1};
  t.fixed_values = Vector::Constant(2, 0.5);
  CalibrationOptions o;
  o.mcmc = short_run(2000);
  o.noise_rel = 0.2;
  auto r = calibrate(m, t, o, 1);
  CHECK(r.failed_evaluations > 0);
  CHECK(std::isfinite(r.fit_error));
  for (const auto& s : r.samples) CHECK(s.sum() < 1.0);
}

TEST_CASE("subsample_regions") {
  auto a = subsample_regions(4096, 500, 7);
  CHECK(a.size() == 500);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  CHECK(a.back() < 4096);
  CHECK(a == subsample_regions(4096, 500, 7));
  CHECK(a != subsample_regions(4096, 500, 8));
  CHECK(subsample_regions(10, 10, 1).size() == 10);
  CHECK_THROWS_AS(subsample_regions(10, 11, 1), InvalidArgumentError);
}
