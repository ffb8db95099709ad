// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/calibration.hpp"
#include "activestab/gradients.hpp"
#include "activestab/stability.hpp"
#include "activestab/surrogate.hpp"
#include "cli/io.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace activestab::cli {

/// Bad flags or config values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model;
  ParameterSpace space;  // model box unless lower/upper are given
  std::size_t bins = 8;
  std::size_t samples = 10;
  std::size_t global_samples = 100000;
  std::optional<std::size_t> n;  // empty: eigenvalue-gap choice
  std::vector<Metric> methods;
  std::size_t morris_trajectories = 100;
  std::size_t morris_levels = 8;
  std::size_t sobol_base = 1 << 14;
  std::size_t sobol_base_local = 1 << 9;
  std::uint64_t seed = 1;
  std::string out;
  int workers = 0;
  GradientMode gradient = GradientMode::finite_difference;
  double h = kDefaultFdStep;
  DistanceNorm norm = DistanceNorm::spectral;
  std::string global_subspace;  // path to a global_subspace.json to reuse
  bool resume = false;
  std::size_t checkpoint_every = 4096;

  // surrogate
  std::vector<std::size_t> region;  // multi-index on the bins grid
  std::optional<ParameterSpace> region_box;
  std::vector<std::size_t> dims;
  std::size_t train = 500;
  std::size_t test = 500;
  AicBasis aic_basis = AicBasis::test;
  std::vector<int> orders{1, 2, 3};
  std::size_t local_samples = 0;  // 0: same as samples

  // calibrate
  std::size_t regions = 500;  // 0: every region
  std::vector<std::size_t> ks;
  std::size_t iterations = 5000;
  std::size_t burn_in = 1000;
  std::size_t adapt_start = 500;
  double noise_rel = 0.01;
  double tie_rel = 1e-3;

  // eigenstudy
  double threshold = 0.125;

  /// Canonical JSON of everything that affects results (not out, workers, resume).
  json canonical() const;
  std::string hash() const;
  std::string provenance() const;

  AnalysisOptions analysis_options(bool local) const;
  SurrogateOptions surrogate_options() const;
  CalibrationOptions calibration_options() const;
};

/// Builds and validates a config for `command` from merged JSON (file keys with flag
/// overrides already applied). Throws UsageError naming the offending field.
RunConfig config_from_json(const std::string& command, const json& j);

}  // namespace activestab::cli
