// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/activesub.hpp"
#include "activestab/classic_gsa.hpp"
#include "activestab/gradients.hpp"
#include "activestab/models.hpp"
#include "activestab/sampling.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace activestab {

enum class Metric { activity, morris, sobol };

const char* metric_name(Metric metric);

struct AnalysisOptions {
  /// Active dimension compared between local and global subspaces.
  std::size_t n = 1;
  GradientOptions gradient;
  DistanceNorm norm = DistanceNorm::spectral;
  bool with_morris = false;
  bool with_sobol = false;
  MorrisOptions morris;
  SobolOptions sobol{1 << 9};
};

/// Sensitivity results recomputed on one sub-box of the admissible space.
struct LocalAnalysis {
  std::size_t region_index = 0;
  SubspaceResult subspace;
  ActivityScores scores;
  std::optional<MorrisResult> morris;
  std::optional<SobolResult> sobol;
  double distance_to_global = 0.0;

  /// Ranking by the given metric; throws InvalidArgumentError if it was not computed.
  Ranking ranking(Metric metric) const;
};

/// Seed of the full-space design; independent of every per-region stream.
std::uint64_t global_design_seed(std::uint64_t master_seed);

/// Active-subspace pipeline (plus optional Morris/Sobol) on an explicit design.
/// Gradients are taken against the model's admissible box. With `global` null the
/// distance is 0 and options.n is used as-is.
LocalAnalysis analyze_design(const QoiModel& model, const ParameterSpace& box, const PointSet& design,
                             const SubspaceResult* global, const AnalysisOptions& options, std::uint64_t stream_seed,
                             std::size_t region_index = 0);

/// Region `region_index` of the grid, sampled with plan.samples LHS points from
/// derive_seed(plan.master_seed, region_index). Errors are rethrown as RegionError.
LocalAnalysis analyze_region(const QoiModel& model, const RegionGrid& grid, std::size_t region_index,
                             const SamplingPlan& plan, const SubspaceResult& global_subspace,
                             const AnalysisOptions& options);

/// Full-box analysis from one LHS design of `total_samples` points. The active
/// dimension is `n_override` when given, otherwise the eigenvalue-gap choice.
LocalAnalysis global_analysis(const QoiModel& model, const ParameterSpace& box, std::size_t total_samples,
                              std::uint64_t seed, std::optional<std::size_t> n_override,
                              const AnalysisOptions& options = {});

struct RegionFailure {
  std::size_t region_index = 0;
  std::string message;
};

struct SweepSummary {
  std::size_t succeeded = 0;
  std::vector<RegionFailure> failures;
};

using RegionSink = std::function<void(const LocalAnalysis&)>;

/// Analyses every listed region (all regions when `regions` is empty). Regions are
/// processed in parallel batches and handed to `sink` in ascending list order.
/// Failing regions are reported in the summary and skipped.
SweepSummary sweep(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                   const SubspaceResult& global_subspace, const AnalysisOptions& options,
                   std::span<const std::size_t> regions, const RegionSink& sink);

/// Convenience wrapper collecting the analyses.
std::vector<LocalAnalysis> sweep_collect(const QoiModel& model, const RegionGrid& grid, const SamplingPlan& plan,
                                         const SubspaceResult& global_subspace, const AnalysisOptions& options,
                                         SweepSummary* summary = nullptr);

struct RankingCensus {
  std::map<Ranking, std::size_t> counts;
  std::size_t total = 0;
  Ranking global_ranking;
  /// 1-based position of the global ranking by descending frequency; 0 if never observed.
  std::size_t global_ranking_position = 0;
  std::size_t global_ranking_frequency = 0;

  std::size_t unique_count() const noexcept { return counts.size(); }
  /// The `limit` most frequent rankings; equal frequencies in lexicographic order.
  std::vector<std::pair<Ranking, std::size_t>> top(std::size_t limit) const;
};

RankingCensus census(std::span<const Ranking> rankings, const Ranking& global_ranking);

/// Percentage of rankings with parameter i among the first k slots, per parameter.
Vector topk_membership(std::span<const Ranking> rankings, std::size_t m, std::size_t k);

/// Mean distance_to_global per (bin, parameter): entry (b, i) averages every region
/// whose multi-index has bin b on axis i.
struct DistanceMap {
  Matrix mean;  ///< bins_per_dim x m
  Eigen::MatrixX<std::size_t> counts;
};

struct RegionDistance {
  std::size_t region_index = 0;
  double distance = 0.0;
};

DistanceMap distance_map(std::span<const RegionDistance> distances, const RegionGrid& grid);
DistanceMap distance_map(std::span<const LocalAnalysis> analyses, const RegionGrid& grid);

/// Collects the per-region data census/topk/distance maps need while a sweep streams.
class SweepAggregator {
 public:
  SweepAggregator(const RegionGrid& grid, std::vector<Metric> metrics);

  void add(const LocalAnalysis& analysis);
  void add(std::size_t region_index, double distance, const std::vector<std::pair<Metric, Ranking>>& rankings);

  const std::vector<Ranking>& rankings(Metric metric) const;
  const std::vector<RegionDistance>& distances() const noexcept { return distances_; }
  const std::vector<Metric>& metrics() const noexcept { return metrics_; }
  DistanceMap distance_map() const { return activestab::distance_map(distances_, grid_); }

 private:
  RegionGrid grid_;
  std::vector<Metric> metrics_;
  std::map<Metric, std::vector<Ranking>> rankings_;
  std::vector<RegionDistance> distances_;
};

struct EigenScenario {
  std::string name;
  ParameterSpace box;
};

struct EigenScenarioResult {
  std::string name;
  ParameterSpace box;
  Vector eigenvalues;
  Vector w1_squared;
  Vector w2_squared;
  ActivityScores scores;
};

/// Global-style decomposition on each sub-box, all from the same seed.
std::vector<EigenScenarioResult> restricted_eigenstudy(const QoiModel& model, std::span<const EigenScenario> scenarios,
                                                       std::size_t total_samples, std::uint64_t seed,
                                                       const GradientOptions& gradient = {});

/// "small-growth" (growth axes <= threshold), "large-growth" (>= threshold) and "full"
/// scenarios for the two growth-rate axes of `space`.
std::vector<EigenScenario> growth_scenarios(const ParameterSpace& space, double threshold,
                                            std::size_t growth_axis_a = 0, std::size_t growth_axis_b = 1);

}  // namespace activestab
