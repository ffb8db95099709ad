// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP counterparts.

#include "activestab/models.hpp"
#include "activestab/parallel.hpp"
#include "activestab/reference.hpp"
#include "activestab/stability.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

namespace {

using namespace activestab;

const QoiModel& lv() {
  static const QoiModel m = make_model("lotka-volterra");
  return m;
}

const PointSet& design(std::size_t n) {
  static std::map<std::size_t, PointSet> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, lhs(n, lv().space, 1)).first;
  return it->second;
}

void BM_EvaluateReference(benchmark::State& state) {
  const auto& pts = design(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate(lv(), pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& pts = design(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(static_cast<std::size_t>(pts.rows()));
  for (auto _ : state) {
    evaluate_parallel(lv(), pts, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientReference(benchmark::State& state) {
  const auto& pts = design(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::gradient_batch(lv(), lv().space, pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State& state) {
  const auto& pts = design(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient_batch(lv(), lv().space, pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<GradientSample> synthetic_gradients(std::size_t n) {
  std::vector<GradientSample> g(n);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (auto& s : g) {
    s.g = Vector(6);
    for (auto& v : s.g) v = n01(rng);
  }
  return g;
}

void BM_EstimateCReference(benchmark::State& state) {
  const auto g = synthetic_gradients(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::estimate_c(g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateCParallel(benchmark::State& state) {
  const auto g = synthetic_gradients(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_c(g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sweep_setup(RegionGrid& grid, SubspaceResult& global, AnalysisOptions& opts) {
  grid = grid_partition(lv().space, 2);
  global = global_analysis(lv(), lv().space, 2000, 1, std::size_t{4}).subspace;
  opts.n = 4;
}

void BM_SweepReference(benchmark::State& state) {
  RegionGrid grid;
  SubspaceResult global;
  AnalysisOptions opts;
  sweep_setup(grid, global, opts);
  for (auto _ : state) benchmark::DoNotOptimize(reference::sweep(lv(), grid, {10, 1}, global, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.total_regions));
}

void BM_SweepParallel(benchmark::State& state) {
  RegionGrid grid;
  SubspaceResult global;
  AnalysisOptions opts;
  sweep_setup(grid, global, opts);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_collect(lv(), grid, {10, 1}, global, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.total_regions));
}

}  // namespace

BENCHMARK(BM_EvaluateReference)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientReference)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateCReference)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateCParallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
