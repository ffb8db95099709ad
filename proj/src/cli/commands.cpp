// SPDX-License-Identifier: Apache-2.0
#include "cli/commands.hpp"

#include "activestab/error.hpp"
#include "activestab/parallel.hpp"
#include "cli/output.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace activestab::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& c) {
  fs::path dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("ACTIVESTAB_OUT");
    dir = env && *env ? env : "results";
  }
  fs::create_directories(dir);
  return dir;
}

void note(const RunConfig& c, const std::string& msg) { std::cerr << c.command << ": " << msg << '\n'; }

GlobalResult compute_global(const RunConfig& c, const QoiModel& model) {
  GlobalResult g;
  g.analysis = global_analysis(model, c.space, c.global_samples, c.seed, c.n, c.analysis_options(false));
  g.rankings[Metric::activity] = g.analysis.scores.ranking;
  if (g.analysis.morris) g.rankings[Metric::morris] = g.analysis.morris->ranking();
  if (g.analysis.sobol) g.rankings[Metric::sobol] = g.analysis.sobol->ranking();
  return g;
}

// Global results from a previous `global` run when configured, otherwise computed.
GlobalResult obtain_global(const RunConfig& c, const QoiModel& model) {
  if (c.global_subspace.empty()) {
    note(c, "computing global subspace from " + std::to_string(c.global_samples) + " points");
    return compute_global(c, model);
  }
  const json j = read_json(c.global_subspace);
  if (j.value("model", "") != c.model)
    throw UsageError("config field 'global_subspace': file was produced for model '" + j.value("model", "") + "'");
  if (!(space_from_json(j.at("plan").at("space")) == c.space))
    throw UsageError("config field 'global_subspace': parameter space differs from this run");
  GlobalResult g = global_from_json(j);
  if (c.n) g.analysis.subspace = g.analysis.subspace.with_dimension(*c.n);
  for (auto m : c.methods)
    if (!g.rankings.count(m))
      throw UsageError(std::string("config field 'global_subspace': no global ") + metric_name(m) + " ranking stored");
  return g;
}

std::vector<std::string> split_csv_simple(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

// Reads the completed part of a regions.csv checkpoint into the aggregator and
// returns how many regions it covers. A trailing partial line is discarded.
std::size_t load_checkpoint(const fs::path& path, const RunConfig& c, const RegionGrid& grid,
                            const std::vector<std::string>& header, SweepAggregator& agg, SweepSummary& summary) {
  std::ifstream f(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto last_newline = content.rfind('\n');
  content.resize(last_newline == std::string::npos ? 0 : last_newline + 1);

  std::istringstream is(content);
  std::string line;
  if (!std::getline(is, line) || line != "# " + c.provenance())
    throw UsageError("cannot resume: " + path.string() + " was written with a different configuration");
  if (!std::getline(is, line) || line + "\n" != csv_line(header))
    throw UsageError("cannot resume: unexpected header in " + path.string());

  const std::size_t m = grid.space.dim();
  std::size_t done = 0;
  while (std::getline(is, line)) {
    const auto cells = split_csv_simple(line);
    if (cells.size() < 2 || std::stoull(cells[0]) != done)
      throw UsageError("cannot resume: " + path.string() + " is not in region order");
    if (cells[1] == "ok") {
      const double distance = std::stod(cells[2 + m]);
      std::vector<std::pair<Metric, Ranking>> rankings;
      for (std::size_t i = 0; i < c.methods.size(); ++i)
        rankings.emplace_back(c.methods[i], parse_ranking(cells.at(3 + m + i), grid.space.names));
      agg.add(done, distance, rankings);
      ++summary.succeeded;
    } else {
      // The message is the last column and may itself be quoted.
      std::size_t pos = 0;
      for (std::size_t i = 0; i + 1 < header.size() && pos != std::string::npos; ++i) {
        pos = line.find(',', pos);
        if (pos != std::string::npos) ++pos;
      }
      std::string message = pos == std::string::npos ? std::string() : line.substr(pos);
      if (message.size() >= 2 && message.front() == '"' && message.back() == '"') {
        std::string raw = message.substr(1, message.size() - 2);
        message.clear();
        for (std::size_t i = 0; i < raw.size(); ++i) {
          message += raw[i];
          if (raw[i] == '"' && i + 1 < raw.size() && raw[i + 1] == '"') ++i;
        }
      }
      summary.failures.push_back({done, message});
    }
    ++done;
  }
  write_file_atomic(path, content);
  return done;
}

}  // namespace

int cmd_global(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  const fs::path dir = output_dir(c);
  const GlobalResult g = compute_global(c, model);
  global_metrics_table(c.provenance(), g, c.space.names).write(dir / "global_metrics.csv");
  write_json(dir / "global_subspace.json", global_to_json(g, c.model, c.space, c.global_samples, c.seed));
  note(c, "wrote global_metrics.csv and global_subspace.json to " + dir.string());
  return kSuccess;
}

int cmd_stability(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  const fs::path dir = output_dir(c);
  const GlobalResult g = obtain_global(c, model);
  const RegionGrid grid = grid_partition(c.space, c.bins);
  const SamplingPlan plan{c.samples, c.seed};
  AnalysisOptions opts = c.analysis_options(true);
  opts.n = g.analysis.subspace.n;

  const auto header = region_header(c.space, c.methods);
  const fs::path regions_path = dir / "regions.csv";
  SweepAggregator agg(grid, c.methods);
  SweepSummary summary;
  std::size_t next = 0;
  if (c.resume && fs::exists(regions_path)) {
    next = load_checkpoint(regions_path, c, grid, header, agg, summary);
    note(c, "resuming after " + std::to_string(next) + " regions");
  } else {
    CsvTable(c.provenance(), header).write(regions_path);
  }

  std::ofstream out(regions_path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + regions_path.string());
  std::vector<std::size_t> batch;
  while (next < grid.total_regions) {
    const std::size_t end = std::min(grid.total_regions, next + c.checkpoint_every);
    batch.resize(end - next);
    std::iota(batch.begin(), batch.end(), next);
    std::vector<std::string> lines(batch.size());
    const auto part = sweep(model, grid, plan, g.analysis.subspace, opts, batch, [&](const LocalAnalysis& a) {
      agg.add(a);
      lines[a.region_index - next] = csv_line(region_row(grid, a, c.methods));
    });
    for (const auto& f : part.failures) {
      lines[f.region_index - next] = csv_line(failed_region_row(grid, f, c.methods));
      summary.failures.push_back(f);
    }
    summary.succeeded += part.succeeded;
    std::string chunk;
    for (const auto& l : lines) chunk += l;
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    out.flush();
    if (!out) throw Error("write to " + regions_path.string() + " failed");
    next = end;
    note(c, std::to_string(next) + "/" + std::to_string(grid.total_regions) + " regions");
  }
  out.close();

  std::map<Metric, RankingCensus> censuses;
  for (auto m : c.methods) censuses[m] = census(agg.rankings(m), g.rankings.at(m));
  const auto& names = c.space.names;
  census_table(c.provenance(), censuses, names).write(dir / "census.csv");
  topk_table(c.provenance(), agg, names).write(dir / "topk.csv");
  const DistanceMap map = agg.distance_map();
  distance_map_table(c.provenance(), map, names).write(dir / "distance_map.csv");

  json metrics = json::object();
  for (const auto& [metric, cen] : censuses) {
    json top = json::array();
    for (const auto& [r, count] : cen.top(10)) top.push_back({{"ranking", ranking_text(r, names)}, {"count", count}});
    json first = json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::size_t count = 0;
      for (const auto& r : agg.rankings(metric)) count += r.front() == i;
      first[names[i]] = count;
    }
    metrics[metric_name(metric)] = {{"unique_count", cen.unique_count()},
                                    {"global_ranking", ranking_text(cen.global_ranking, names)},
                                    {"global_ranking_position", cen.global_ranking_position},
                                    {"global_ranking_frequency", cen.global_ranking_frequency},
                                    {"first_place_counts", first},
                                    {"top10", top}};
  }
  json failed = json::array();
  for (const auto& f : summary.failures) failed.push_back({{"region_index", f.region_index}, {"message", f.message}});
  const double fraction =
      static_cast<double>(summary.succeeded) / static_cast<double>(std::max<std::size_t>(1, grid.total_regions));
  std::vector<std::vector<double>> map_rows;
  for (Eigen::Index b = 0; b < map.mean.rows(); ++b) {
    map_rows.emplace_back();
    for (Eigen::Index i = 0; i < map.mean.cols(); ++i) map_rows.back().push_back(map.mean(b, i));
  }
  write_json(dir / "summary.json", {{"provenance", c.provenance()},
                                    {"model", c.model},
                                    {"plan", plan_to_json(c.space, c.bins, plan)},
                                    {"n", opts.n},
                                    {"regions", grid.total_regions},
                                    {"succeeded", summary.succeeded},
                                    {"failed", summary.failures.size()},
                                    {"success_fraction", fraction},
                                    {"failed_regions", failed},
                                    {"metrics", metrics},
                                    {"distance_map", {{"parameters", names}, {"mean", map_rows}}}});
  note(c, std::to_string(summary.succeeded) + " regions analysed, " + std::to_string(summary.failures.size()) +
              " failed");
  return fraction >= 0.99 ? kSuccess : kFailure;
}

int cmd_surrogate(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  const fs::path dir = output_dir(c);
  ParameterSpace region;
  std::uint64_t region_seed = 0;
  if (!c.region.empty()) {
    const RegionGrid grid = grid_partition(c.space, c.bins);
    const std::size_t index = grid.region_index(c.region);
    region = region_bounds(grid, index);
    region_seed = derive_seed(c.seed, index);
  } else if (c.region_box) {
    region = *c.region_box;
    region_seed = derive_seed(c.seed, fnv1a(to_json(region).dump()));
  } else {
    throw UsageError("surrogate: name a region with 'region' (multi-index) or 'region_lower'/'region_upper'");
  }
  const GlobalResult g = obtain_global(c, model);

  const std::size_t local_m = c.local_samples ? c.local_samples : c.samples;
  AnalysisOptions opts = c.analysis_options(true);
  opts.with_morris = opts.with_sobol = false;
  opts.n = 1;
  const PointSet design = lhs(local_m, region, region_seed);
  const LocalAnalysis local = analyze_design(model, region, design, nullptr, opts, region_seed);

  const auto rows = compare_global_local(model, region, g.analysis.subspace, local.subspace, c.dims,
                                         c.surrogate_options(), derive_seed(region_seed, 3));
  surrogate_table(c.provenance(), rows).write(dir / "surrogate.csv");
  surrogate_points_table(c.provenance(), rows).write(dir / "surrogate_points.csv");
  write_json(dir / "surrogate_region.json", {{"provenance", c.provenance()},
                                             {"region", to_json(region)},
                                             {"local_samples", local_m},
                                             {"local_subspace", to_json(local.subspace)},
                                             {"global_subspace", to_json(g.analysis.subspace)}});
  note(c, "wrote surrogate.csv and surrogate_points.csv to " + dir.string());
  return kSuccess;
}

int cmd_calibrate(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  const fs::path dir = output_dir(c);
  RunConfig activity_only = c;
  activity_only.methods = {Metric::activity};
  const GlobalResult g = obtain_global(activity_only, model);
  const RegionGrid grid = grid_partition(c.space, c.bins);
  const std::size_t count = c.regions == 0 ? grid.total_regions : c.regions;
  if (count > grid.total_regions)
    throw UsageError("config field 'regions': grid has only " + std::to_string(grid.total_regions) + " regions");
  const auto picked = subsample_regions(grid.total_regions, count, derive_seed(c.seed, ~std::uint64_t{1}));

  AnalysisOptions opts = c.analysis_options(true);
  opts.with_morris = opts.with_sobol = false;
  opts.n = g.analysis.subspace.n;
  std::vector<RegionRanking> rankings;
  rankings.reserve(picked.size());
  const auto sw = sweep(model, grid, {c.samples, c.seed}, g.analysis.subspace, opts, picked,
                        [&](const LocalAnalysis& a) { rankings.push_back({a.region_index, a.scores.ranking}); });
  note(c, "local rankings for " + std::to_string(rankings.size()) + " regions; running chains");

  CalibrationExperiment ex =
      experiment_sweep(model, grid, rankings, g.rankings.at(Metric::activity), c.ks, c.calibration_options(), c.seed);
  for (const auto& f : sw.failures) ex.failures.push_back({f.region_index, 0, f.message});

  calibration_table(c.provenance(), ex, c.space.names).write(dir / "calibration.csv");
  json summary = calibration_summary(ex);
  summary["provenance"] = c.provenance();
  summary["global_ranking"] = ranking_text(g.rankings.at(Metric::activity), c.space.names);
  summary["regions"] = picked.size();
  write_json(dir / "calibration_summary.json", summary);
  const std::size_t attempted = picked.size() * c.ks.size();
  note(c, "wrote calibration.csv and calibration_summary.json to " + dir.string());
  return ex.failures.size() * 100 <= attempted ? kSuccess : kFailure;
}

int cmd_gradfield(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  if (model.dim != 2) throw UsageError("gradfield: model '" + c.model + "' is not two-dimensional");
  const fs::path dir = output_dir(c);
  const GlobalResult g = obtain_global(c, model);
  const RegionGrid grid = grid_partition(c.space, c.bins);

  PointSet centres(static_cast<Eigen::Index>(grid.total_regions), 2);
  for (std::size_t r = 0; r < grid.total_regions; ++r) {
    const ParameterSpace box = region_bounds(grid, r);
    for (std::size_t i = 0; i < 2; ++i)
      centres(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = 0.5 * (box.lower[i] + box.upper[i]);
  }
  GradientOptions gopts;
  gopts.mode = c.gradient;
  gopts.h = c.h;
  const auto grads = gradient_batch(model, model.space, centres, gopts);

  AnalysisOptions opts = c.analysis_options(true);
  opts.with_morris = opts.with_sobol = false;
  opts.n = 1;
  std::vector<Vector> w1(grid.total_regions);
  const auto sw = sweep(model, grid, {c.samples, c.seed}, g.analysis.subspace, opts, {},
                        [&](const LocalAnalysis& a) { w1[a.region_index] = a.subspace.eigenvectors.col(0); });

  CsvTable t(c.provenance(), {"kind", "bin_1", "bin_2", "x1", "x2", "g1", "g2", "w1_1", "w1_2"});
  const Vector gw = g.analysis.subspace.eigenvectors.col(0);
  t.row({"global", "", "", "", "", "", "", fmt(gw[0]), fmt(gw[1])});
  for (std::size_t r = 0; r < grid.total_regions; ++r) {
    const auto multi = grid.multi_index(r);
    const Vector& gr = grads[r].g;
    const double norm = gr.norm();
    const Vector dir_g = norm > 0.0 ? Vector(gr / norm) : Vector(gr);
    const bool ok = w1[r].size() == 2;
    t.row({"cell", std::to_string(multi[0]), std::to_string(multi[1]), fmt(centres(static_cast<Eigen::Index>(r), 0)),
           fmt(centres(static_cast<Eigen::Index>(r), 1)), fmt(dir_g[0]), fmt(dir_g[1]), ok ? fmt(w1[r][0]) : "",
           ok ? fmt(w1[r][1]) : ""});
  }
  t.write(dir / "gradfield.csv");
  note(c, "wrote gradfield.csv to " + dir.string());
  return sw.failures.empty() ? kSuccess : kFailure;
}

int cmd_eigenstudy(const RunConfig& c) {
  const QoiModel model = make_model(c.model);
  if (model.dim < 2) throw UsageError("eigenstudy: needs at least two parameters");
  const fs::path dir = output_dir(c);
  const auto scenarios = growth_scenarios(c.space, c.space.lower[0] + c.threshold * c.space.width(0));
  GradientOptions gopts;
  gopts.mode = c.gradient;
  gopts.h = c.h;
  const auto results = restricted_eigenstudy(model, scenarios, c.global_samples, c.seed, gopts);

  CsvTable t(c.provenance(), {"scenario", "quantity", "index", "label", "value"});
  const auto& names = c.space.names;
  for (const auto& r : results) {
    const auto m = static_cast<std::size_t>(r.eigenvalues.size());
    for (std::size_t j = 0; j < m; ++j)
      t.row({r.name, "eigenvalue", std::to_string(j + 1), "lambda_" + std::to_string(j + 1),
             fmt(r.eigenvalues[static_cast<Eigen::Index>(j)])});
    for (std::size_t i = 0; i < m; ++i)
      t.row({r.name, "w1_squared", std::to_string(i + 1), names[i], fmt(r.w1_squared[static_cast<Eigen::Index>(i)])});
    for (std::size_t i = 0; i < m; ++i)
      t.row({r.name, "w2_squared", std::to_string(i + 1), names[i], fmt(r.w2_squared[static_cast<Eigen::Index>(i)])});
    for (std::size_t i = 0; i < m; ++i)
      t.row({r.name, "activity_score", std::to_string(i + 1), names[i],
             fmt(r.scores.normalized[static_cast<Eigen::Index>(i)])});
  }
  t.write(dir / "eigenstudy.csv");
  note(c, "wrote eigenstudy.csv to " + dir.string());
  return kSuccess;
}

int execute(const RunConfig& c) {
  set_worker_count(c.workers);
  if (c.command == "global") return cmd_global(c);
  if (c.command == "stability") return cmd_stability(c);
  if (c.command == "surrogate") return cmd_surrogate(c);
  if (c.command == "calibrate") return cmd_calibrate(c);
  if (c.command == "gradfield") return cmd_gradfield(c);
  if (c.command == "eigenstudy") return cmd_eigenstudy(c);
  throw UsageError("unknown command '" + c.command + "'");
}

namespace {

// Registers a flag whose value, when given, overrides config key `key`.
template <class T>
CLI::Option* flag(CLI::App* app, json& overrides, const std::string& name, const std::string& key,
                  const std::string& help) {
  return app->add_option_function<T>(name, [&overrides, key](const T& v) { overrides[key] = v; }, help);
}

void common_flags(CLI::App* app, json& o, std::string& config_path) {
  app->add_option("--config", config_path, "JSON config file; flags override its keys");
  flag<std::string>(app, o, "--model", "model", "f1, f2, f3 or lotka-volterra");
  flag<std::uint64_t>(app, o, "--seed", "seed", "master seed");
  flag<std::string>(app, o, "--out", "out", "output directory (default $ACTIVESTAB_OUT, else ./results)");
  flag<int>(app, o, "--workers", "workers", "worker threads (0 = all cores, 1 = serial)");
  flag<std::string>(app, o, "--gradient", "gradient", "fd or analytic");
  flag<double>(app, o, "--fd-step", "h", "finite-difference step in scaled coordinates");
  flag<std::vector<double>>(app, o, "--lower", "lower", "parameter lower bounds")->delimiter(',');
  flag<std::vector<double>>(app, o, "--upper", "upper", "parameter upper bounds")->delimiter(',');
}

void n_flag(CLI::App* app, json& o) {
  app->add_option_function<std::string>(
      "--n",
      [&o](const std::string& v) {
        if (v == "auto") {
          o["n"] = "auto";
          return;
        }
        try {
          std::size_t used = 0;
          const long long n = std::stoll(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          o["n"] = n;
        } catch (const std::exception&) {
          throw CLI::ValidationError("--n", "expected an integer or 'auto'");
        }
      },
      "active dimension or 'auto'");
}

void global_flags(CLI::App* app, json& o, bool samples_is_global) {
  flag<std::size_t>(app, o, samples_is_global ? "--samples" : "--global-samples", "global_samples",
                    "points in the full-space design");
  flag<std::string>(app, o, "--global-subspace", "global_subspace", "reuse a global_subspace.json");
  n_flag(app, o);
}

void method_flags(CLI::App* app, json& o) {
  flag<std::vector<std::string>>(app, o, "--methods", "methods", "activity,morris,sobol")->delimiter(',');
  flag<std::size_t>(app, o, "--morris-trajectories", "morris_trajectories", "Morris trajectories r");
  flag<std::size_t>(app, o, "--morris-levels", "morris_levels", "Morris levels p (even)");
  flag<std::size_t>(app, o, "--sobol-base", "sobol_base", "Sobol base samples, full space");
  flag<std::size_t>(app, o, "--sobol-base-local", "sobol_base_local", "Sobol base samples per region");
  flag<std::string>(app, o, "--norm", "norm", "spectral or frobenius");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Active-subspace sensitivity stability analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ACTIVESTAB_VERSION);

  json overrides = json::object();
  std::string config_path;

  auto* global = app.add_subcommand("global", "full-space activity scores, Morris and Sobol indices");
  common_flags(global, overrides, config_path);
  global_flags(global, overrides, true);
  method_flags(global, overrides);

  auto* stability = app.add_subcommand("stability", "sweep every region of a grid against the global subspace");
  common_flags(stability, overrides, config_path);
  global_flags(stability, overrides, false);
  method_flags(stability, overrides);
  flag<std::size_t>(stability, overrides, "--bins", "bins", "bins per axis");
  flag<std::size_t>(stability, overrides, "--samples", "samples", "LHS points per region");
  flag<std::size_t>(stability, overrides, "--checkpoint-every", "checkpoint_every", "regions per checkpoint");
  stability->add_flag_callback("--resume", [&] { overrides["resume"] = true; }, "continue from regions.csv");

  auto* surrogate = app.add_subcommand("surrogate", "global vs local polynomial surrogates on one region");
  common_flags(surrogate, overrides, config_path);
  global_flags(surrogate, overrides, false);
  flag<std::size_t>(surrogate, overrides, "--bins", "bins", "bins per axis for --region");
  flag<std::size_t>(surrogate, overrides, "--samples", "samples", "LHS points for the local subspace");
  flag<std::vector<std::size_t>>(surrogate, overrides, "--region", "region", "region multi-index")->delimiter(',');
  flag<std::vector<double>>(surrogate, overrides, "--region-lower", "region_lower", "region lower bounds")
      ->delimiter(',');
  flag<std::vector<double>>(surrogate, overrides, "--region-upper", "region_upper", "region upper bounds")
      ->delimiter(',');
  flag<std::vector<std::size_t>>(surrogate, overrides, "--dims", "dims", "active dimensions to compare")
      ->delimiter(',');
  flag<std::size_t>(surrogate, overrides, "--train", "train", "training points");
  flag<std::size_t>(surrogate, overrides, "--test", "test", "testing points");
  flag<std::string>(surrogate, overrides, "--aic-basis", "aic_basis", "test or train");

  auto* calibrate = app.add_subcommand("calibrate", "global- vs local-subset calibration over sampled regions");
  common_flags(calibrate, overrides, config_path);
  global_flags(calibrate, overrides, false);
  flag<std::size_t>(calibrate, overrides, "--bins", "bins", "bins per axis");
  flag<std::size_t>(calibrate, overrides, "--samples", "samples", "LHS points per region for local rankings");
  flag<std::size_t>(calibrate, overrides, "--regions", "regions", "regions to subsample (0 = all)");
  flag<std::vector<std::size_t>>(calibrate, overrides, "--ks", "ks", "subset sizes")->delimiter(',');
  flag<std::size_t>(calibrate, overrides, "--iterations", "iterations", "chain length");
  flag<std::size_t>(calibrate, overrides, "--burn-in", "burn_in", "discarded iterations");
  flag<double>(calibrate, overrides, "--noise-rel", "noise_rel", "likelihood scale relative to the data");
  flag<double>(calibrate, overrides, "--tie-rel", "tie_rel", "tie tolerance relative to the data");

  auto* gradfield = app.add_subcommand("gradfield", "per-cell gradient directions of a 2-D model");
  common_flags(gradfield, overrides, config_path);
  global_flags(gradfield, overrides, false);
  flag<std::size_t>(gradfield, overrides, "--bins", "bins", "cells per axis");
  flag<std::size_t>(gradfield, overrides, "--samples", "samples", "LHS points per cell");

  auto* eigenstudy = app.add_subcommand("eigenstudy", "eigenstructure under restricted growth rates");
  common_flags(eigenstudy, overrides, config_path);
  flag<std::size_t>(eigenstudy, overrides, "--samples", "global_samples", "points per scenario design");
  flag<double>(eigenstudy, overrides, "--threshold", "threshold", "growth-rate split as a fraction of the range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    json merged = json::object();
    if (!config_path.empty()) {
      try {
        merged = read_json(config_path);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      if (!merged.is_object()) throw UsageError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : overrides.items()) merged[key] = value;
    const RunConfig cfg = config_from_json(app.get_subcommands().front()->get_name(), merged);
    return execute(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace activestab::cli
