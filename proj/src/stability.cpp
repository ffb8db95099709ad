// SPDX-License-Identifier: Apache-2.0
#include "activestab/stability.hpp"

#include "activestab/error.hpp"

#include <algorithm>
#include <numeric>

namespace activestab {

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::activity:
      return "activity";
    case Metric::morris:
      return "morris";
    case Metric::sobol:
      return "sobol";
  }
  return "?";
}

Ranking LocalAnalysis::ranking(Metric metric) const {
  switch (metric) {
    case Metric::activity:
      return scores.ranking;
    case Metric::morris:
      if (!morris) throw InvalidArgumentError("Morris results were not computed for this region");
      return morris->ranking();
    case Metric::sobol:
      if (!sobol) throw InvalidArgumentError("Sobol results were not computed for this region");
      return sobol->ranking();
  }
  return {};
}

std::uint64_t global_design_seed(std::uint64_t master_seed) { return derive_seed(master_seed, ~std::uint64_t{0}); }

LocalAnalysis analyze_design(const QoiModel& model, const ParameterSpace& box, const PointSet& design,
                             const SubspaceResult* global, const AnalysisOptions& options, std::uint64_t stream_seed,
                             std::size_t region_index) {
  if (options.n < 1 || options.n > model.dim)
    throw InvalidArgumentError("active dimension n must lie in [1, m]");
  LocalAnalysis out;
  out.region_index = region_index;
  const auto samples = gradient_batch(model, model.space, design, options.gradient);
  out.subspace = eigendecompose(estimate_c(samples)).with_dimension(options.n);
  out.scores = activity_scores(out.subspace);
  if (global != nullptr) {
    const SubspaceResult g = global->with_dimension(options.n);
    out.distance_to_global = subspace_distance(out.subspace.W1(), g.W1(), options.norm);
  }
  if (options.with_morris) out.morris = morris(model, box, options.morris, derive_seed(stream_seed, 1));
  if (options.with_sobol) out.sobol = sobol(model, box, options.sobol, derive_seed(stream_seed, 2));
  return out;
}

LocalAnalysis analyze_region(const QoiModel& model, const RegionGrid& grid, std::size_t region_index,
                             const SamplingPlan& plan, const SubspaceResult& global_subspace,
                             const AnalysisOptions& options) {
  try {
    const ParameterSpace box = region_bounds(grid, region_index);
    const std::uint64_t seed = derive_seed(plan.master_seed, region_index);
    const PointSet design = lhs(plan.samples, box, seed);
    return analyze_design(model, box, design, &global_subspace, options, seed, region_index);
  } catch (const RegionError&) {
    throw;
  } catch (const std::exception& e) {
    throw RegionError(region_index, e.what());
  }
}

LocalAnalysis global_analysis(const QoiModel& model, const ParameterSpace& box, std::size_t total_samples,
                              std::uint64_t seed, std::optional<std::size_t> n_override,
                              const AnalysisOptions& options) {
  const std::uint64_t design_seed = global_design_seed(seed);
  const PointSet design = lhs(total_samples, box, design_seed);
  AnalysisOptions opts = options;
  opts.n = 1;
  LocalAnalysis out = analyze_design(model, box, design, nullptr, opts, design_seed);
  const std::size_t n = n_override ? *n_override : select_dimension(out.subspace.eigenvalues);
  out.subspace = out.subspace.with_dimension(n);
  out.distance_to_global = 0.0;
  return out;
}

namespace {

constexpr std::size_t kSweepBatch = 512;

}  // namespace

SweepSummary sweep(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                   const SubspaceResult& global_subspace, const AnalysisOptions& options,
                   std::span<const std::size_t> regions, const RegionSink& sink) {
  std::vector<std::size_t> all;
  if (regions.empty()) {
    all.resize(grid.total_regions);
    std::iota(all.begin(), all.end(), std::size_t{0});
    regions = all;
  }
  SweepSummary summary;
  std::vector<std::optional<LocalAnalysis>> results;
  std::vector<std::string> errors;
  for (std::size_t begin = 0; begin < regions.size(); begin += kSweepBatch) {
    const std::size_t count = std::min(kSweepBatch, regions.size() - begin);
    results.assign(count, std::nullopt);
    errors.assign(count, {});
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      const auto u = static_cast<std::size_t>(i);
      try {
        results[u] = analyze_region(model, grid, regions[begin + u], plan, global_subspace, options);
      } catch (const std::exception& e) {
        errors[u] = e.what();
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (results[i]) {
        ++summary.succeeded;
        sink(*results[i]);
      } else {
        summary.failures.push_back({regions[begin + i], errors[i]});
      }
    }
  }
  return summary;
}

std::vector<LocalAnalysis> sweep_collect(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                                         const SubspaceResult& global_subspace, const AnalysisOptions& options,
                                         SweepSummary* summary) {
  std::vector<LocalAnalysis> out;
  out.reserve(grid.total_regions);
  auto s = sweep(model, grid, plan, global_subspace, options, {},
                 [&](const LocalAnalysis& a) { out.push_back(a); });
  if (summary) *summary = std::move(s);
  return out;
}

std::vector<std::pair<Ranking, std::size_t>> RankingCensus::top(std::size_t limit) const {
  std::vector<std::pair<Ranking, std::size_t>> sorted(counts.begin(), counts.end());
  // counts is ordered lexicographically, so a stable sort keeps that order for ties.
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > limit) sorted.resize(limit);
  return sorted;
}

RankingCensus census(std::span<const Ranking> rankings, const Ranking& global_ranking) {
  RankingCensus c;
  c.global_ranking = global_ranking;
  for (const auto& r : rankings) {
    if (!rankings.empty() && r.size() != rankings.front().size())
      throw DimensionMismatchError("census: rankings differ in length");
    ++c.counts[r];
  }
  c.total = rankings.size();
  if (auto it = c.counts.find(global_ranking); it != c.counts.end()) {
    c.global_ranking_frequency = it->second;
    const auto order = c.top(c.counts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i].first == global_ranking) {
        c.global_ranking_position = i + 1;
        break;
      }
    }
  }
  return c;
}

Vector topk_membership(std::span<const Ranking> rankings, std::size_t m, std::size_t k) {
  if (k < 1 || k > m) throw InvalidArgumentError("top-k membership needs 1 <= k <= m");
  Vector pct = Vector::Zero(static_cast<Eigen::Index>(m));
  if (rankings.empty()) return pct;
  for (const auto& r : rankings) {
    if (r.size() != m) throw DimensionMismatchError("top-k membership: ranking length differs from m");
    for (std::size_t slot = 0; slot < k; ++slot) pct[static_cast<Eigen::Index>(r[slot])] += 1.0;
  }
  return pct * (100.0 / static_cast<double>(rankings.size()));
}

DistanceMap distance_map(std::span<const RegionDistance> distances, const RegionGrid& grid) {
  const auto k = static_cast<Eigen::Index>(grid.bins_per_dim);
  const auto m = static_cast<Eigen::Index>(grid.space.dim());
  DistanceMap map{Matrix::Zero(k, m), Eigen::MatrixX<std::size_t>::Zero(k, m)};
  for (const auto& d : distances) {
    const auto multi = grid.multi_index(d.region_index);
    for (Eigen::Index axis = 0; axis < m; ++axis) {
      const auto bin = static_cast<Eigen::Index>(multi[static_cast<std::size_t>(axis)]);
      map.mean(bin, axis) += d.distance;
      map.counts(bin, axis) += 1;
    }
  }
  for (Eigen::Index b = 0; b < k; ++b)
    for (Eigen::Index axis = 0; axis < m; ++axis)
      if (map.counts(b, axis) > 0) map.mean(b, axis) /= static_cast<double>(map.counts(b, axis));
  return map;
}

DistanceMap distance_map(std::span<const LocalAnalysis> analyses, const RegionGrid& grid) {
  std::vector<RegionDistance> d;
  d.reserve(analyses.size());
  for (const auto& a : analyses) d.push_back({a.region_index, a.distance_to_global});
  return distance_map(d, grid);
}

SweepAggregator::SweepAggregator(const RegionGrid& grid, std::vector<Metric> metrics)
    : grid_(grid), metrics_(std::move(metrics)) {
  for (Metric m : metrics_) rankings_[m];
}

void SweepAggregator::add(const LocalAnalysis& analysis) {
  std::vector<std::pair<Metric, Ranking>> r;
  for (Metric m : metrics_) r.emplace_back(m, analysis.ranking(m));
  add(analysis.region_index, analysis.distance_to_global, r);
}

void SweepAggregator::add(std::size_t region_index, double distance,
                          const std::vector<std::pair<Metric, Ranking>>& rankings) {
  for (const auto& [metric, ranking] : rankings) {
    auto it = rankings_.find(metric);
    if (it != rankings_.end()) it->second.push_back(ranking);
  }
  distances_.push_back({region_index, distance});
}

const std::vector<Ranking>& SweepAggregator::rankings(Metric metric) const {
  auto it = rankings_.find(metric);
  if (it == rankings_.end()) throw InvalidArgumentError(std::string("metric not aggregated: ") + metric_name(metric));
  return it->second;
}

std::vector<EigenScenarioResult> restricted_eigenstudy(const QoiModel& model, std::span<const EigenScenario> scenarios,
                                                       std::size_t total_samples, std::uint64_t seed,
                                                       const GradientOptions& gradient) {
  std::vector<EigenScenarioResult> out;
  AnalysisOptions options;
  options.gradient = gradient;
  for (const auto& s : scenarios) {
    const LocalAnalysis a = global_analysis(model, s.box, total_samples, seed, std::size_t{1}, options);
    EigenScenarioResult r{s.name, s.box, a.subspace.eigenvalues, a.subspace.eigenvectors.col(0).array().square(),
                          {}, a.scores};
    if (a.subspace.dim() > 1) r.w2_squared = a.subspace.eigenvectors.col(1).array().square();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EigenScenario> growth_scenarios(const ParameterSpace& space, double threshold, std::size_t axis_a,
                                            std::size_t axis_b) {
  ParameterSpace small = space;
  ParameterSpace large = space;
  for (std::size_t axis : {axis_a, axis_b}) {
    if (axis >= space.dim()) throw InvalidArgumentError("growth axis out of range");
    if (!(threshold > space.lower[axis] && threshold < space.upper[axis]))
      throw InvalidArgumentError("growth threshold must lie strictly inside the axis range");
    small.upper[axis] = threshold;
    large.lower[axis] = threshold;
  }
  return {{"small-growth", small}, {"large-growth", large}, {"full", space}};
}

}  // namespace activestab
