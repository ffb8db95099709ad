// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/activesub.hpp"
#include "activestab/sampling.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace activestab::cli {

using nlohmann::json;

json to_json(const ParameterSpace& space);
ParameterSpace space_from_json(const json& j);

json to_json(const SubspaceResult& s);
SubspaceResult subspace_from_json(const json& j);

/// Replayable description of a sampling plan; `bins` is 0 for a single global design.
json plan_to_json(const ParameterSpace& space, std::size_t bins, const SamplingPlan& plan);
SamplingPlan plan_from_json(const json& j);

/// Shortest decimal text that reads back to the same double.
std::string fmt(double v);

/// Ranking rendered with parameter names, e.g. "K_S>K_R>r_R".
std::string ranking_text(const Ranking& r, const std::vector<std::string>& names);
Ranking parse_ranking(std::string_view text, const std::vector<std::string>& names);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// CSV assembled in memory and written in one go. The first line is a `#` comment
/// with provenance, the second the header.
class CsvTable {
 public:
  CsvTable(std::string provenance, std::vector<std::string> header);

  CsvTable& row(const std::vector<std::string>& cells);
  const std::string& text() const noexcept { return text_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

std::string csv_line(const std::vector<std::string>& cells);

/// Writes through a temporary file and a rename so readers never see half a file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace activestab::cli
