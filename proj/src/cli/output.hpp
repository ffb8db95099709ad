// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/calibration.hpp"
#include "activestab/stability.hpp"
#include "activestab/surrogate.hpp"
#include "cli/io.hpp"

#include <map>
#include <string>
#include <vector>

namespace activestab::cli {

/// Everything later commands need from a global run.
struct GlobalResult {
  LocalAnalysis analysis;
  std::map<Metric, Ranking> rankings;
};

json global_to_json(const GlobalResult& g, const std::string& model, const ParameterSpace& space,
                    std::size_t samples, std::uint64_t seed);
GlobalResult global_from_json(const json& j);

/// Table-1 layout: one row per metric, one column per parameter.
CsvTable global_metrics_table(const std::string& provenance, const GlobalResult& g,
                              const std::vector<std::string>& names);

std::vector<std::string> region_header(const ParameterSpace& space, const std::vector<Metric>& metrics);
std::vector<std::string> region_row(const RegionGrid& grid, const LocalAnalysis& a, const std::vector<Metric>& metrics);
std::vector<std::string> failed_region_row(const RegionGrid& grid, const RegionFailure& f,
                                           const std::vector<Metric>& metrics);

CsvTable census_table(const std::string& provenance, const std::map<Metric, RankingCensus>& censuses,
                      const std::vector<std::string>& names);
CsvTable topk_table(const std::string& provenance, const SweepAggregator& agg, const std::vector<std::string>& names);
CsvTable distance_map_table(const std::string& provenance, const DistanceMap& map,
                            const std::vector<std::string>& names);

CsvTable surrogate_table(const std::string& provenance, const std::vector<ComparisonRow>& rows);
CsvTable surrogate_points_table(const std::string& provenance, const std::vector<ComparisonRow>& rows);

CsvTable calibration_table(const std::string& provenance, const CalibrationExperiment& ex,
                           const std::vector<std::string>& names);
json calibration_summary(const CalibrationExperiment& ex);

}  // namespace activestab::cli
