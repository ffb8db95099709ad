// SPDX-License-Identifier: Apache-2.0
#include "cli/io.hpp"

#include "activestab/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace activestab::cli {

json to_json(const ParameterSpace& space) {
  return {{"names", space.names}, {"lower", space.lower}, {"upper", space.upper}};
}

ParameterSpace space_from_json(const json& j) {
  return {j.at("names").get<std::vector<std::string>>(), j.at("lower").get<std::vector<double>>(),
          j.at("upper").get<std::vector<double>>()};
}

json to_json(const SubspaceResult& s) {
  const auto m = s.eigenvalues.size();
  std::vector<double> values(s.eigenvalues.data(), s.eigenvalues.data() + m);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) rows[static_cast<std::size_t>(i)].push_back(s.eigenvectors(i, j));
  return {{"eigenvalues", values}, {"eigenvectors", rows}, {"n", s.n}};
}

SubspaceResult subspace_from_json(const json& j) {
  const auto values = j.at("eigenvalues").get<std::vector<double>>();
  const auto rows = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
  const auto m = static_cast<Eigen::Index>(values.size());
  if (m == 0 || rows.size() != values.size()) throw InvalidArgumentError("subspace JSON: inconsistent sizes");
  SubspaceResult s;
  s.eigenvalues = Eigen::Map<const Vector>(values.data(), m);
  s.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != values.size())
      throw InvalidArgumentError("subspace JSON: eigenvector rows must have m entries");
    for (Eigen::Index c = 0; c < m; ++c) s.eigenvectors(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return s.with_dimension(j.at("n").get<std::size_t>());
}

json plan_to_json(const ParameterSpace& space, std::size_t bins, const SamplingPlan& plan) {
  return {{"space", to_json(space)}, {"bins", bins}, {"samples", plan.samples}, {"master_seed", plan.master_seed},
          {"design", "latin-hypercube"}};
}

SamplingPlan plan_from_json(const json& j) {
  if (j.value("design", "latin-hypercube") != "latin-hypercube")
    throw InvalidArgumentError("sampling plan: only latin-hypercube designs are supported");
  return {j.at("samples").get<std::size_t>(), j.at("master_seed").get<std::uint64_t>()};
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string ranking_text(const Ranking& r, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += '>';
    out += names.at(r[i]);
  }
  return out;
}

Ranking parse_ranking(std::string_view text, const std::vector<std::string>& names) {
  Ranking r;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = std::min(text.find('>', pos), text.size());
    const auto token = text.substr(pos, next - pos);
    std::size_t idx = 0;
    while (idx < names.size() && names[idx] != token) ++idx;
    if (idx == names.size()) throw InvalidArgumentError("unknown parameter '" + std::string(token) + "' in ranking");
    r.push_back(idx);
    pos = next + 1;
  }
  return r;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out += c;
    } else {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
  }
  out += '\n';
  return out;
}

CsvTable::CsvTable(std::string provenance, std::vector<std::string> header) : columns_(header.size()) {
  text_ = "# " + provenance + "\n" + csv_line(header);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row width does not match its header");
  text_ += csv_line(cells);
  return *this;
}

void CsvTable::write(const std::filesystem::path& path) const { write_file_atomic(path, text_); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgumentError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(path.string() + ": " + e.what());
  }
}

}  // namespace activestab::cli
