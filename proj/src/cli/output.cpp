// SPDX-License-Identifier: Apache-2.0
#include "cli/output.hpp"

#include "activestab/error.hpp"

#include <algorithm>

namespace activestab::cli {

namespace {

std::vector<std::string> names_of(const Ranking& r, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (auto i : r) out.push_back(names.at(i));
  return out;
}

Ranking ranking_from_names(const std::vector<std::string>& given, const std::vector<std::string>& names) {
  Ranking r;
  for (const auto& g : given) {
    const auto it = std::find(names.begin(), names.end(), g);
    if (it == names.end()) throw InvalidArgumentError("global JSON: unknown parameter '" + g + "'");
    r.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return r;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> numeric_row(const std::string& label, const Vector& v) {
  std::vector<std::string> row{label};
  for (double x : v) row.push_back(fmt(x));
  return row;
}

}  // namespace

json global_to_json(const GlobalResult& g, const std::string& model, const ParameterSpace& space,
                    std::size_t samples, std::uint64_t seed) {
  json rankings = json::object();
  for (const auto& [metric, r] : g.rankings) rankings[metric_name(metric)] = names_of(r, space.names);
  return {{"model", model},
          {"plan", plan_to_json(space, 0, {samples, seed})},
          {"subspace", to_json(g.analysis.subspace)},
          {"activity_scores",
           {{"raw", to_std(g.analysis.scores.raw)}, {"normalized", to_std(g.analysis.scores.normalized)}}},
          {"rankings", rankings}};
}

GlobalResult global_from_json(const json& j) {
  GlobalResult g;
  const ParameterSpace space = space_from_json(j.at("plan").at("space"));
  g.analysis.subspace = subspace_from_json(j.at("subspace"));
  g.analysis.scores = activity_scores(g.analysis.subspace);
  for (const auto& [key, value] : j.at("rankings").items()) {
    Metric metric;
    if (key == "activity") {
      metric = Metric::activity;
    } else if (key == "morris") {
      metric = Metric::morris;
    } else if (key == "sobol") {
      metric = Metric::sobol;
    } else {
      throw InvalidArgumentError("global JSON: unknown ranking '" + key + "'");
    }
    g.rankings[metric] = ranking_from_names(value.get<std::vector<std::string>>(), space.names);
  }
  return g;
}

CsvTable global_metrics_table(const std::string& provenance, const GlobalResult& g,
                              const std::vector<std::string>& names) {
  std::vector<std::string> header{"metric"};
  header.insert(header.end(), names.begin(), names.end());
  CsvTable t(provenance, header);
  const auto& a = g.analysis;
  t.row(numeric_row("activity_score", a.scores.normalized));
  t.row(numeric_row("activity_score_raw", a.scores.raw));
  if (a.morris) {
    t.row(numeric_row("morris_mu", a.morris->mu));
    t.row(numeric_row("morris_mu_star", a.morris->mu_star));
    t.row(numeric_row("morris_sigma", a.morris->sigma));
  }
  if (a.sobol) {
    t.row(numeric_row("sobol_first_order", a.sobol->first_order));
    t.row(numeric_row("sobol_total_effect", a.sobol->total_effect));
  }
  return t;
}

std::vector<std::string> region_header(const ParameterSpace& space, const std::vector<Metric>& metrics) {
  std::vector<std::string> h{"region_index", "status"};
  for (const auto& n : space.names) h.push_back("bin_" + n);
  h.emplace_back("distance");
  for (auto m : metrics) h.push_back(std::string("ranking_") + metric_name(m));
  for (std::size_t j = 1; j <= space.dim(); ++j) h.push_back("lambda_" + std::to_string(j));
  h.emplace_back("error");
  return h;
}

std::vector<std::string> region_row(const RegionGrid& grid, const LocalAnalysis& a,
                                    const std::vector<Metric>& metrics) {
  std::vector<std::string> row{std::to_string(a.region_index), "ok"};
  for (auto b : grid.multi_index(a.region_index)) row.push_back(std::to_string(b));
  row.push_back(fmt(a.distance_to_global));
  for (auto m : metrics) row.push_back(ranking_text(a.ranking(m), grid.space.names));
  for (double l : a.subspace.eigenvalues) row.push_back(fmt(l));
  row.emplace_back();
  return row;
}

std::vector<std::string> failed_region_row(const RegionGrid& grid, const RegionFailure& f,
                                           const std::vector<Metric>& metrics) {
  std::vector<std::string> row{std::to_string(f.region_index), "failed"};
  for (auto b : grid.multi_index(f.region_index)) row.push_back(std::to_string(b));
  row.emplace_back();
  for (std::size_t i = 0; i < metrics.size(); ++i) row.emplace_back();
  for (std::size_t j = 0; j < grid.space.dim(); ++j) row.emplace_back();
  std::string message = f.message;
  std::replace(message.begin(), message.end(), '\n', ' ');
  row.push_back(std::move(message));
  return row;
}

CsvTable census_table(const std::string& provenance, const std::map<Metric, RankingCensus>& censuses,
                      const std::vector<std::string>& names) {
  CsvTable t(provenance, {"metric", "position", "ranking", "count", "percent", "is_global"});
  for (const auto& [metric, c] : censuses) {
    const auto rows = c.top(c.unique_count());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double pct = c.total ? 100.0 * static_cast<double>(rows[i].second) / static_cast<double>(c.total) : 0.0;
      t.row({metric_name(metric), std::to_string(i + 1), ranking_text(rows[i].first, names),
             std::to_string(rows[i].second), fmt(pct), rows[i].first == c.global_ranking ? "1" : "0"});
    }
  }
  return t;
}

CsvTable topk_table(const std::string& provenance, const SweepAggregator& agg, const std::vector<std::string>& names) {
  CsvTable t(provenance, {"metric", "k", "parameter", "percent"});
  const std::size_t m = names.size();
  for (auto metric : agg.metrics()) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, m); ++k) {
      const Vector pct = topk_membership(agg.rankings(metric), m, k);
      for (std::size_t i = 0; i < m; ++i)
        t.row({metric_name(metric), std::to_string(k), names[i], fmt(pct[static_cast<Eigen::Index>(i)])});
    }
  }
  return t;
}

CsvTable distance_map_table(const std::string& provenance, const DistanceMap& map,
                            const std::vector<std::string>& names) {
  std::vector<std::string> header{"bin"};
  header.insert(header.end(), names.begin(), names.end());
  CsvTable t(provenance, header);
  for (Eigen::Index b = 0; b < map.mean.rows(); ++b) t.row(numeric_row(std::to_string(b), map.mean.row(b).transpose()));
  return t;
}

CsvTable surrogate_table(const std::string& provenance, const std::vector<ComparisonRow>& rows) {
  CsvTable t(provenance, {"n", "source", "order", "n_coeffs", "train_rss", "test_rss", "aic", "rmse", "selected"});
  for (const auto& r : rows) {
    const auto& sel = r.selection;
    for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
      const auto& c = sel.candidates[i];
      t.row({std::to_string(r.n), source_name(r.source), std::to_string(c.order),
             std::to_string(c.coefficients.size()), fmt(c.train_rss), fmt(c.test_rss), fmt(c.aic),
             i == sel.best ? fmt(sel.rmse) : "", i == sel.best ? "1" : "0"});
    }
  }
  return t;
}

CsvTable surrogate_points_table(const std::string& provenance, const std::vector<ComparisonRow>& rows) {
  CsvTable t(provenance, {"n", "source", "point", "actual", "predicted"});
  for (const auto& r : rows) {
    const auto& sel = r.selection;
    for (Eigen::Index p = 0; p < sel.test_actual.size(); ++p)
      t.row({std::to_string(r.n), source_name(r.source), std::to_string(p), fmt(sel.test_actual[p]),
             fmt(sel.test_predicted[p])});
  }
  return t;
}

CsvTable calibration_table(const std::string& provenance, const CalibrationExperiment& ex,
                           const std::vector<std::string>& names) {
  CsvTable t(provenance, {"region_index", "k", "subset_global", "subset_local", "data_qoi", "err_global", "err_local",
                          "difference", "winner"});
  for (const auto& c : ex.comparisons)
    t.row({std::to_string(c.region_index), std::to_string(c.k), ranking_text(c.global_subset, names),
           ranking_text(c.local_subset, names), fmt(c.data_qoi), fmt(c.global_error), fmt(c.local_error),
           fmt(c.difference()), winner_name(c.winner)});
  return t;
}

json calibration_summary(const CalibrationExperiment& ex) {
  json per_k = json::array();
  for (const auto& r : ex.rates) {
    std::vector<double> diffs;
    for (const auto& c : ex.comparisons)
      if (c.k == r.k) diffs.push_back(c.difference());
    std::sort(diffs.begin(), diffs.end());
    auto quantile = [&](double q) -> json {
      if (diffs.empty()) return nullptr;
      return diffs[static_cast<std::size_t>(q * static_cast<double>(diffs.size() - 1) + 0.5)];
    };
    const std::size_t decided = r.local + r.global;
    per_k.push_back({{"k", r.k},
                     {"regions", r.total()},
                     {"local_wins", r.local},
                     {"global_wins", r.global},
                     {"ties", r.ties},
                     {"local_percent", r.percent(r.local)},
                     {"global_percent", r.percent(r.global)},
                     {"tie_percent", r.percent(r.ties)},
                     {"local_share_of_decided",
                      decided ? json(100.0 * static_cast<double>(r.local) / static_cast<double>(decided)) : json(nullptr)},
                     {"difference_quantiles",
                      {{"min", quantile(0.0)},
                       {"q25", quantile(0.25)},
                       {"median", quantile(0.5)},
                       {"q75", quantile(0.75)},
                       {"max", quantile(1.0)}}}});
  }
  json failures = json::array();
  for (const auto& f : ex.failures)
    failures.push_back({{"region_index", f.region_index}, {"k", f.k}, {"message", f.message}});
  return {{"per_k", per_k}, {"failures", failures}};
}

}  // namespace activestab::cli
