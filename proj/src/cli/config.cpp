// SPDX-License-Identifier: Apache-2.0
#include "cli/config.hpp"

#include "activestab/models.hpp"

#include <algorithm>
#include <set>

#ifndef ACTIVESTAB_VERSION
#define ACTIVESTAB_VERSION "dev"
#endif

namespace activestab::cli {

namespace {

const std::set<std::string> kKnownKeys{
    "model",      "lower",       "upper",          "bins",         "samples",      "global_samples",
    "n",          "methods",     "morris_trajectories", "morris_levels", "sobol_base", "sobol_base_local",
    "seed",       "out",         "workers",        "gradient",     "h",            "norm",
    "global_subspace", "resume", "checkpoint_every", "region",     "region_lower", "region_upper",
    "dims",       "train",       "test",           "aic_basis",    "orders",       "local_samples",
    "regions",    "ks",          "iterations",     "burn_in",      "adapt_start",  "noise_rel",
    "tie_rel",    "threshold"};

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw UsageError("config field '" + field + "': " + why);
}

template <class T>
T get(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(key, "has the wrong type");
  }
}

std::size_t positive(const json& j, const std::string& key, std::size_t fallback) {
  if (j.contains(key) && j.at(key).is_number_integer() && j.at(key).get<long long>() < 1) bad(key, "must be >= 1");
  if (j.contains(key) && j.at(key).is_number_float()) bad(key, "must be an integer");
  const auto v = get<std::size_t>(j, key, fallback);
  if (v < 1) bad(key, "must be >= 1");
  return v;
}

Metric parse_metric(const std::string& s) {
  if (s == "activity") return Metric::activity;
  if (s == "morris") return Metric::morris;
  if (s == "sobol") return Metric::sobol;
  bad("methods", "unknown method '" + s + "' (expected activity, morris or sobol)");
}

}  // namespace

RunConfig config_from_json(const std::string& command, const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.count(key)) bad(key, "unknown key");

  RunConfig c;
  c.command = command;
  c.model = get<std::string>(j, "model", "");
  if (c.model.empty()) bad("model", "is required (one of f1, f2, f3, lotka-volterra)");
  QoiModel model;
  try {
    model = make_model(c.model);
  } catch (const std::exception&) {
    bad("model", "unknown model '" + c.model + "'");
  }
  c.space = model.space;
  if (j.contains("lower") || j.contains("upper")) {
    try {
      c.space = ParameterSpace(model.space.names, get<std::vector<double>>(j, "lower", model.space.lower),
                               get<std::vector<double>>(j, "upper", model.space.upper));
    } catch (const std::exception& e) {
      bad("lower/upper", e.what());
    }
  }
  const std::size_t m = model.dim;

  c.bins = positive(j, "bins", c.bins);
  c.samples = positive(j, "samples", c.samples);
  c.global_samples = positive(j, "global_samples", c.global_samples);
  if (j.contains("n") && !(j.at("n").is_string() && j.at("n").get<std::string>() == "auto")) {
    c.n = positive(j, "n", 1);
    if (*c.n > m) bad("n", "must not exceed the model dimension " + std::to_string(m));
  }
  for (const auto& s : get<std::vector<std::string>>(j, "methods", {})) {
    const Metric metric = parse_metric(s);
    if (std::find(c.methods.begin(), c.methods.end(), metric) == c.methods.end()) c.methods.push_back(metric);
  }
  if (c.methods.empty()) {
    c.methods = command == "global" ? std::vector<Metric>{Metric::activity, Metric::morris, Metric::sobol}
                                    : std::vector<Metric>{Metric::activity};
  }
  std::sort(c.methods.begin(), c.methods.end());
  if (c.methods.front() != Metric::activity) c.methods.insert(c.methods.begin(), Metric::activity);

  c.morris_trajectories = positive(j, "morris_trajectories", c.morris_trajectories);
  if (c.morris_trajectories < 2) bad("morris_trajectories", "must be >= 2");
  c.morris_levels = positive(j, "morris_levels", c.morris_levels);
  if (c.morris_levels % 2 != 0) bad("morris_levels", "must be even");
  c.sobol_base = positive(j, "sobol_base", c.sobol_base);
  c.sobol_base_local = positive(j, "sobol_base_local", c.sobol_base_local);
  if (c.sobol_base < 2) bad("sobol_base", "must be >= 2");
  if (c.sobol_base_local < 2) bad("sobol_base_local", "must be >= 2");
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  c.out = get<std::string>(j, "out", "");
  c.workers = get<int>(j, "workers", 0);
  if (c.workers < 0) bad("workers", "must be >= 0");

  const auto grad = get<std::string>(j, "gradient", "fd");
  if (grad == "fd") {
    c.gradient = GradientMode::finite_difference;
  } else if (grad == "analytic") {
    if (!model.has_analytic_gradient()) bad("gradient", "model '" + c.model + "' has no analytic gradient");
    c.gradient = GradientMode::analytic;
  } else {
    bad("gradient", "expected fd or analytic");
  }
  c.h = get<double>(j, "h", c.h);
  if (!(c.h > 0.0 && c.h < 0.5)) bad("h", "must lie in (0, 0.5)");
  const auto norm = get<std::string>(j, "norm", "spectral");
  if (norm == "spectral") {
    c.norm = DistanceNorm::spectral;
  } else if (norm == "frobenius") {
    c.norm = DistanceNorm::frobenius;
  } else {
    bad("norm", "expected spectral or frobenius");
  }
  c.global_subspace = get<std::string>(j, "global_subspace", "");
  c.resume = get<bool>(j, "resume", false);
  c.checkpoint_every = positive(j, "checkpoint_every", c.checkpoint_every);

  c.region = get<std::vector<std::size_t>>(j, "region", {});
  if (!c.region.empty()) {
    if (c.region.size() != m) bad("region", "multi-index needs " + std::to_string(m) + " entries");
    for (auto b : c.region)
      if (b >= c.bins) bad("region", "bin index out of range for bins = " + std::to_string(c.bins));
  }
  if (j.contains("region_lower") || j.contains("region_upper")) {
    if (!c.region.empty()) bad("region", "give either a multi-index or region_lower/region_upper, not both");
    try {
      ParameterSpace box(c.space.names, get<std::vector<double>>(j, "region_lower", {}),
                         get<std::vector<double>>(j, "region_upper", {}));
      for (std::size_t i = 0; i < m; ++i)
        if (box.lower[i] < c.space.lower[i] || box.upper[i] > c.space.upper[i])
          throw std::invalid_argument("region must lie inside the parameter space");
      c.region_box = box;
    } catch (const std::exception& e) {
      bad("region_lower/region_upper", e.what());
    }
  }
  c.dims = get<std::vector<std::size_t>>(j, "dims", {});
  if (c.dims.empty())
    for (std::size_t d = 1; d < m; ++d) c.dims.push_back(d);
  for (auto d : c.dims)
    if (d < 1 || d >= m) bad("dims", "entries must lie in [1, " + std::to_string(m - 1) + "]");
  c.train = positive(j, "train", c.train);
  c.test = positive(j, "test", c.test);
  const auto basis = get<std::string>(j, "aic_basis", "test");
  if (basis == "test") {
    c.aic_basis = AicBasis::test;
  } else if (basis == "train") {
    c.aic_basis = AicBasis::train;
  } else {
    bad("aic_basis", "expected test or train");
  }
  c.orders = get<std::vector<int>>(j, "orders", c.orders);
  if (c.orders.empty()) bad("orders", "must not be empty");
  for (int d : c.orders)
    if (d < 1 || d > 3) bad("orders", "entries must lie in [1, 3]");
  std::sort(c.orders.begin(), c.orders.end());
  c.orders.erase(std::unique(c.orders.begin(), c.orders.end()), c.orders.end());
  c.local_samples = get<std::size_t>(j, "local_samples", 0);

  c.regions = get<std::size_t>(j, "regions", c.regions);
  c.ks = get<std::vector<std::size_t>>(j, "ks", {});
  if (c.ks.empty())
    for (std::size_t k = 1; k <= m; ++k) c.ks.push_back(k);
  for (auto k : c.ks)
    if (k < 1 || k > m) bad("ks", "entries must lie in [1, " + std::to_string(m) + "]");
  c.iterations = positive(j, "iterations", c.iterations);
  c.burn_in = get<std::size_t>(j, "burn_in", c.burn_in);
  c.adapt_start = positive(j, "adapt_start", c.adapt_start);
  if (c.burn_in >= c.iterations) bad("burn_in", "must be below iterations");
  if (c.adapt_start < 2) bad("adapt_start", "must be >= 2");
  c.noise_rel = get<double>(j, "noise_rel", c.noise_rel);
  if (!(c.noise_rel > 0.0)) bad("noise_rel", "must be positive");
  c.tie_rel = get<double>(j, "tie_rel", c.tie_rel);
  if (!(c.tie_rel >= 0.0)) bad("tie_rel", "must be nonnegative");
  c.threshold = get<double>(j, "threshold", c.threshold);
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) bad("threshold", "must lie in (0, 1) of the growth-rate range");
  return c;
}

json RunConfig::canonical() const {
  std::vector<std::string> method_names;
  for (auto mth : methods) method_names.emplace_back(metric_name(mth));
  json j{{"command", command},
         {"model", model},
         {"space", to_json(space)},
         {"bins", bins},
         {"samples", samples},
         {"global_samples", global_samples},
         {"n", n ? json(*n) : json("auto")},
         {"methods", method_names},
         {"morris_trajectories", morris_trajectories},
         {"morris_levels", morris_levels},
         {"sobol_base", sobol_base},
         {"sobol_base_local", sobol_base_local},
         {"seed", seed},
         {"gradient", gradient == GradientMode::analytic ? "analytic" : "fd"},
         {"h", h},
         {"norm", norm == DistanceNorm::spectral ? "spectral" : "frobenius"},
         {"global_subspace", global_subspace}};
  if (command == "surrogate") {
    j["region"] = region;
    if (region_box) j["region_box"] = to_json(*region_box);
    j["dims"] = dims;
    j["train"] = train;
    j["test"] = test;
    j["aic_basis"] = aic_basis == AicBasis::test ? "test" : "train";
    j["orders"] = orders;
    j["local_samples"] = local_samples;
  }
  if (command == "calibrate") {
    j["regions"] = regions;
    j["ks"] = ks;
    j["iterations"] = iterations;
    j["burn_in"] = burn_in;
    j["adapt_start"] = adapt_start;
    j["noise_rel"] = noise_rel;
    j["tie_rel"] = tie_rel;
  }
  if (command == "eigenstudy") j["threshold"] = threshold;
  return j;
}

std::string RunConfig::hash() const { return hex64(fnv1a(canonical().dump())); }

std::string RunConfig::provenance() const {
  return std::string("activestab ") + ACTIVESTAB_VERSION + " config=" + hash() + " seed=" + std::to_string(seed);
}

AnalysisOptions RunConfig::analysis_options(bool local) const {
  AnalysisOptions o;
  o.n = n.value_or(1);
  o.gradient.mode = gradient;
  o.gradient.h = h;
  o.norm = norm;
  o.with_morris = std::find(methods.begin(), methods.end(), Metric::morris) != methods.end();
  o.with_sobol = std::find(methods.begin(), methods.end(), Metric::sobol) != methods.end();
  o.morris.trajectories = morris_trajectories;
  o.morris.levels = morris_levels;
  o.sobol.base_samples = local ? sobol_base_local : sobol_base;
  return o;
}

SurrogateOptions RunConfig::surrogate_options() const {
  SurrogateOptions o;
  o.train_count = train;
  o.test_count = test;
  o.aic_basis = aic_basis;
  o.orders = orders;
  return o;
}

CalibrationOptions RunConfig::calibration_options() const {
  CalibrationOptions o;
  o.mcmc.iterations = iterations;
  o.mcmc.burn_in = burn_in;
  o.mcmc.adapt_start = adapt_start;
  o.mcmc.keep_samples = false;
  o.noise_rel = noise_rel;
  o.tie_rel = tie_rel;
  return o;
}

}  // namespace activestab::cli
