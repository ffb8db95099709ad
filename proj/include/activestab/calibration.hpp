// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/activesub.hpp"
#include "activestab/models.hpp"
#include "activestab/sampling.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace activestab {

struct McmcOptions {
  std::size_t iterations = 5000;
  std::size_t burn_in = 1000;
  /// Iteration after which the proposal covariance follows the chain history.
  std::size_t adapt_start = 500;
  std::size_t adapt_interval = 100;
  /// Initial proposal standard deviation in unit-box coordinates.
  double initial_scale = 0.1;
  /// Second-stage proposal scale relative to the first.
  double dr_scale = 0.2;
  double regularization = 1e-8;
  bool keep_samples = true;

  void validate() const;
};

/// Adaptive Metropolis with one delayed-rejection stage on the unit box [0,1]^k.
///
/// Driven as a state machine so many chains can share batched target evaluations:
///
///   Vector u;
///   while (chain.next_request(u)) chain.submit(log_density(u));
///
/// Proposals outside the box have zero density and are rejected without a request.
/// Every iteration consumes exactly 2k normals and 2 uniforms, so two chains with the
/// same seed see identical proposal noise regardless of their acceptance history.
class AdaptiveMetropolis {
 public:
  AdaptiveMetropolis(Vector start, double start_log_density, const McmcOptions& options, std::uint64_t seed);

  bool done() const noexcept { return iteration_ >= options_.iterations; }
  /// Writes the next point to evaluate; false once the chain has finished.
  bool next_request(Vector& point);
  /// Log density at the last requested point (-inf for a failed evaluation).
  void submit(double log_density);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(current_.size()); }
  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t accepted() const noexcept { return accepted_; }
  double acceptance_rate() const;
  const Vector& current() const noexcept { return current_; }
  double current_log_density() const noexcept { return current_logd_; }
  /// Highest-density chain state seen so far (burn-in included).
  const Vector& best() const noexcept { return best_; }
  double best_log_density() const noexcept { return best_logd_; }
  /// Post-burn-in states, one per iteration (empty unless keep_samples).
  const std::vector<Vector>& samples() const noexcept { return samples_; }

 private:
  enum class Stage { fresh, first, second };

  void draw_noise();
  void finish_iteration();
  void accept(const Vector& point, double logd);
  void adapt();
  double second_stage_log_alpha(double logd2) const;

  McmcOptions options_;
  Rng rng_;
  Stage stage_ = Stage::fresh;
  std::size_t iteration_ = 0;
  std::size_t accepted_ = 0;

  Vector current_;
  double current_logd_;
  Vector best_;
  double best_logd_;

  Matrix chol_;  // lower Cholesky factor of the first-stage proposal covariance
  Vector z1_, z2_;
  double u1_ = 0.0, u2_ = 0.0;
  Vector y1_, y2_;
  double logd1_ = 0.0;

  // Running moments of the chain for adaptation.
  std::size_t count_ = 0;
  Vector mean_;
  Matrix m2_;

  std::vector<Vector> samples_;
};

using LogDensity = std::function<double(const Vector&)>;

/// Runs a chain to completion against a scalar log density on [0,1]^k.
AdaptiveMetropolis run_chain(const Vector& start, const LogDensity& log_density, const McmcOptions& options,
                             std::uint64_t seed);

/// One synthetic calibration problem: data from `true_params`, with only
/// `free_subset` estimated and every other parameter pinned at `fixed_values`.
struct CalibrationTask {
  std::size_t region_index = 0;
  Vector true_params;
  double data_qoi = 0.0;
  std::size_t k = 0;
  std::vector<std::size_t> free_subset;  ///< in ranking order
  Vector fixed_values;                   ///< full-length; midpoints of the admissible ranges
};

/// True parameters are drawn uniformly from `region` with derive_seed(seed, 0); the
/// data is the noiseless QoI there. The free subset is the first k entries of `ranking`.
CalibrationTask make_task(const QoiModel& model, std::size_t region_index, const ParameterSpace& region,
                          std::size_t k, const Ranking& ranking, std::uint64_t seed);

struct CalibrationOptions {
  McmcOptions mcmc;
  /// Likelihood scale as a fraction of |data QoI|.
  double noise_rel = 0.01;
  /// Fits whose errors differ by at most (tie_rel * data QoI)^2 are ties.
  double tie_rel = 1e-3;

  void validate() const;
};

struct ChainResult {
  std::vector<Vector> samples;  ///< free parameters in model units, post burn-in
  double acceptance_rate = 0.0;
  Vector best_fit;              ///< free parameters in model units, subset order
  double fit_error = 0.0;       ///< (data QoI - model QoI)^2 at best_fit
  std::size_t failed_evaluations = 0;
};

/// Calibrates one task. The chain runs over the free parameters sorted by index, so
/// set-equal subsets give identical chains; best_fit is reported in subset order.
ChainResult calibrate(const QoiModel& model, const CalibrationTask& task, const CalibrationOptions& options,
                      std::uint64_t seed);

/// Lockstep version of calibrate for many tasks; target evaluations are batched
/// through QoiModel::evaluate_rows. Results match calibrate bit for bit.
std::vector<ChainResult> calibrate_many(const QoiModel& model, std::span<const CalibrationTask> tasks,
                                        std::span<const std::uint64_t> seeds, const CalibrationOptions& options);

enum class Winner { global, local, tie };

const char* winner_name(Winner winner);

struct SubsetComparison {
  std::size_t region_index = 0;
  std::size_t k = 0;
  std::vector<std::size_t> global_subset;
  std::vector<std::size_t> local_subset;
  double data_qoi = 0.0;
  double global_error = 0.0;
  double local_error = 0.0;
  Winner winner = Winner::tie;

  /// global_error - local_error
  double difference() const noexcept { return global_error - local_error; }
};

/// Decides the winner from two fit errors. Set-equal subsets always tie.
Winner judge(const SubsetComparison& comparison, double tie_rel);

/// Global- and local-ranking calibrations of one region with paired chain seeds.
SubsetComparison compare_subsets(const QoiModel& model, std::size_t region_index, const ParameterSpace& region,
                                 std::size_t k, const Ranking& global_ranking, const Ranking& local_ranking,
                                 const CalibrationOptions& options, std::uint64_t seed);

struct RegionRanking {
  std::size_t region_index = 0;
  Ranking local;
};

struct CalibrationFailure {
  std::size_t region_index = 0;
  std::size_t k = 0;
  std::string message;
};

struct WinRates {
  std::size_t k = 0;
  std::size_t local = 0;
  std::size_t global = 0;
  std::size_t ties = 0;

  std::size_t total() const noexcept { return local + global + ties; }
  double percent(std::size_t count) const;
};

struct CalibrationExperiment {
  std::vector<SubsetComparison> comparisons;  ///< region-major, then ascending k
  std::vector<WinRates> rates;                ///< one per requested k
  std::vector<CalibrationFailure> failures;
};

/// Runs compare_subsets for every (region, k) pair, batching all chains in lockstep.
/// The synthetic data of a region is shared by every k. Region seeds are
/// derive_seed(seed, region_index).
CalibrationExperiment experiment_sweep(const QoiModel& model, const RegionGrid& grid,
                                       std::span<const RegionRanking> regions, const Ranking& global_ranking,
                                       std::span<const std::size_t> ks, const CalibrationOptions& options,
                                       std::uint64_t seed);

/// `count` distinct region indices drawn uniformly without replacement, ascending.
std::vector<std::size_t> subsample_regions(std::size_t total_regions, std::size_t count, std::uint64_t seed);

}  // namespace activestab
