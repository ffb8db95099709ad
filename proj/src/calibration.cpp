// SPDX-License-Identifier: Apache-2.0
#include "activestab/calibration.hpp"

#include "activestab/error.hpp"
#include "activestab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace activestab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool inside_unit_box(const Vector& u) { return (u.array() > 0.0).all() && (u.array() < 1.0).all(); }

double sanitize(double logd) { return std::isnan(logd) ? kNegInf : logd; }

// log(1 - min(1, exp(d)))
double log_one_minus_alpha(double d) {
  if (d >= 0.0) return kNegInf;
  return std::log1p(-std::exp(d));
}

}  // namespace

void McmcOptions::validate() const {
  if (iterations == 0) throw InvalidArgumentError("mcmc: iterations must be positive");
  if (burn_in >= iterations) throw InvalidArgumentError("mcmc: burn-in must be below the iteration count");
  if (adapt_interval == 0) throw InvalidArgumentError("mcmc: adaptation interval must be positive");
  if (adapt_start < 2) throw InvalidArgumentError("mcmc: adaptation needs at least two prior states");
  if (!(initial_scale > 0.0) || !(dr_scale > 0.0) || dr_scale >= 1.0)
    throw InvalidArgumentError("mcmc: proposal scales must be positive and dr_scale below 1");
  if (!(regularization >= 0.0)) throw InvalidArgumentError("mcmc: regularization must be nonnegative");
}

AdaptiveMetropolis::AdaptiveMetropolis(Vector start, double start_log_density, const McmcOptions& options,
                                       std::uint64_t seed)
    : options_(options),
      rng_(seed),
      current_(std::move(start)),
      current_logd_(sanitize(start_log_density)),
      best_(current_),
      best_logd_(current_logd_) {
  options_.validate();
  const auto k = current_.size();
  if (k == 0) throw InvalidArgumentError("mcmc: empty parameter vector");
  chol_ = Matrix::Identity(k, k) * options_.initial_scale;
  z1_.resize(k);
  z2_.resize(k);
  mean_ = Vector::Zero(k);
  m2_ = Matrix::Zero(k, k);
  if (options_.keep_samples) samples_.reserve(options_.iterations - options_.burn_in);
}

double AdaptiveMetropolis::acceptance_rate() const {
  return iteration_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(iteration_);
}

void AdaptiveMetropolis::draw_noise() {
  for (Eigen::Index i = 0; i < z1_.size(); ++i) z1_[i] = rng_.normal();
  u1_ = rng_.uniform_open();
  for (Eigen::Index i = 0; i < z2_.size(); ++i) z2_[i] = rng_.normal();
  u2_ = rng_.uniform_open();
}

void AdaptiveMetropolis::accept(const Vector& point, double logd) {
  current_ = point;
  current_logd_ = logd;
  ++accepted_;
  if (logd > best_logd_) {
    best_ = point;
    best_logd_ = logd;
  }
}

void AdaptiveMetropolis::adapt() {
  if (count_ < 2) return;
  const auto k = static_cast<double>(current_.size());
  Matrix cov = m2_ / static_cast<double>(count_ - 1);
  cov.diagonal().array() += options_.regularization;
  cov *= 2.38 * 2.38 / k;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) chol_ = llt.matrixL();
}

void AdaptiveMetropolis::finish_iteration() {
  ++iteration_;
  ++count_;
  const Vector delta = current_ - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (current_ - mean_).transpose();
  if (options_.keep_samples && iteration_ > options_.burn_in) samples_.push_back(current_);
  if (iteration_ >= options_.adapt_start && (iteration_ - options_.adapt_start) % options_.adapt_interval == 0)
    adapt();
  stage_ = Stage::fresh;
}

double AdaptiveMetropolis::second_stage_log_alpha(double logd2) const {
  if (logd2 == kNegInf) return kNegInf;
  // Gaussian first-stage proposal densities; normalising constants cancel.
  const Vector back = chol_.triangularView<Eigen::Lower>().solve(y1_ - y2_);
  const double log_q_from_y2 = -0.5 * back.squaredNorm();
  const double log_q_from_x = -0.5 * z1_.squaredNorm();
  const double num = logd2 + log_q_from_y2 + log_one_minus_alpha(logd1_ - logd2);
  const double den = current_logd_ + log_q_from_x + log_one_minus_alpha(logd1_ - current_logd_);
  if (num == kNegInf) return kNegInf;
  return num - den;
}

bool AdaptiveMetropolis::next_request(Vector& point) {
  while (!done()) {
    if (stage_ == Stage::fresh) {
      draw_noise();
      y1_ = current_ + chol_ * z1_;
      if (inside_unit_box(y1_)) {
        stage_ = Stage::first;
        point = y1_;
        return true;
      }
      logd1_ = kNegInf;
    }
    // First stage rejected: try the shrunken proposal.
    y2_ = current_ + options_.dr_scale * (chol_ * z2_);
    if (inside_unit_box(y2_)) {
      stage_ = Stage::second;
      point = y2_;
      return true;
    }
    finish_iteration();
  }
  return false;
}

void AdaptiveMetropolis::submit(double log_density) {
  const double logd = sanitize(log_density);
  if (stage_ == Stage::first) {
    logd1_ = logd;
    if (logd != kNegInf && std::log(u1_) < logd - current_logd_) {
      accept(y1_, logd);
      finish_iteration();
      return;
    }
    y2_ = current_ + options_.dr_scale * (chol_ * z2_);
    if (inside_unit_box(y2_)) {
      stage_ = Stage::second;
    } else {
      finish_iteration();
    }
    return;
  }
  if (stage_ == Stage::second) {
    if (std::log(u2_) < second_stage_log_alpha(logd)) accept(y2_, logd);
    finish_iteration();
    return;
  }
  throw Error("mcmc: submit without a pending request");
}

AdaptiveMetropolis run_chain(const Vector& start, const LogDensity& log_density, const McmcOptions& options,
                             std::uint64_t seed) {
  AdaptiveMetropolis chain(start, log_density(start), options, seed);
  Vector u;
  while (chain.next_request(u)) chain.submit(log_density(u));
  return chain;
}

// ---------------------------------------------------------------------------

void CalibrationOptions::validate() const {
  mcmc.validate();
  if (!(noise_rel > 0.0)) throw InvalidArgumentError("calibration: noise_rel must be positive");
  if (!(tie_rel >= 0.0)) throw InvalidArgumentError("calibration: tie_rel must be nonnegative");
}

CalibrationTask make_task(const QoiModel& model, std::size_t region_index, const ParameterSpace& region,
                          std::size_t k, const Ranking& ranking, std::uint64_t seed) {
  const std::size_t m = model.dim;
  if (region.dim() != m || ranking.size() != m) throw DimensionMismatchError("make_task: dimension mismatch");
  if (k < 1 || k > m) throw InvalidArgumentError("make_task: k must lie in [1, m]");

  CalibrationTask task;
  task.region_index = region_index;
  task.k = k;
  Rng rng(derive_seed(seed, 0));
  Vector u(static_cast<Eigen::Index>(m));
  for (auto& v : u) v = rng.uniform_open();
  task.true_params.resize(static_cast<Eigen::Index>(m));
  region.from_unit(as_span(u), as_span(task.true_params));
  task.data_qoi = model(as_span(task.true_params));
  if (!std::isfinite(task.data_qoi)) throw Error("make_task: model returned a non-finite QoI at the true parameters");
  task.free_subset.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
  task.fixed_values.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    task.fixed_values[static_cast<Eigen::Index>(i)] = 0.5 * (model.space.lower[i] + model.space.upper[i]);
  return task;
}

namespace {

// Calibration target of one task in the chain's (sorted-subset, unit-box) coordinates.
struct Target {
  const QoiModel* model;
  std::vector<std::size_t> axes;  // sorted free subset
  Vector fixed;
  double data = 0.0;
  double two_s2 = 1.0;

  Target(const QoiModel& m, const CalibrationTask& task, const CalibrationOptions& options)
      : model(&m), axes(task.free_subset), fixed(task.fixed_values), data(task.data_qoi) {
    std::sort(axes.begin(), axes.end());
    double s = options.noise_rel * std::abs(task.data_qoi);
    if (!(s > 0.0)) s = options.noise_rel;
    two_s2 = 2.0 * s * s;
  }

  void to_full(const Vector& u, std::span<double> out) const {
    for (Eigen::Index i = 0; i < fixed.size(); ++i) out[static_cast<std::size_t>(i)] = fixed[i];
    for (std::size_t j = 0; j < axes.size(); ++j) {
      const std::size_t a = axes[j];
      out[a] = model->space.lower[a] + u[static_cast<Eigen::Index>(j)] * model->space.width(a);
    }
  }

  double log_density(double q) const {
    if (!std::isfinite(q)) return kNegInf;
    const double r = data - q;
    return -(r * r) / two_s2;
  }

  Vector start() const { return Vector::Constant(static_cast<Eigen::Index>(axes.size()), 0.5); }

  // Chain coordinates -> free parameters in model units and subset order.
  Vector to_subset(const CalibrationTask& task, const Vector& u) const {
    Vector out(static_cast<Eigen::Index>(task.free_subset.size()));
    for (std::size_t j = 0; j < task.free_subset.size(); ++j) {
      const std::size_t a = task.free_subset[j];
      const auto pos = static_cast<Eigen::Index>(std::lower_bound(axes.begin(), axes.end(), a) - axes.begin());
      out[static_cast<Eigen::Index>(j)] = model->space.lower[a] + u[pos] * model->space.width(a);
    }
    return out;
  }
};

// Evaluates the rows, falling back to one-by-one evaluation so a single failing
// point only poisons itself.
void evaluate_tolerant(const QoiModel& model, const PointSet& rows, std::span<double> out, std::size_t& failures) {
  try {
    evaluate_parallel(model, rows, out);
  } catch (const std::exception&) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      try {
        out[static_cast<std::size_t>(r)] = model(row_span(rows, r));
      } catch (const std::exception&) {
        out[static_cast<std::size_t>(r)] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) ++failures;
}

}  // namespace

std::vector<ChainResult> calibrate_many(const QoiModel& model, std::span<const CalibrationTask> tasks,
                                        std::span<const std::uint64_t> seeds, const CalibrationOptions& options) {
  options.validate();
  if (tasks.size() != seeds.size()) throw DimensionMismatchError("calibrate_many: one seed per task required");
  const std::size_t m = model.dim;
  const std::size_t count = tasks.size();

  std::vector<Target> targets;
  targets.reserve(count);
  for (const auto& t : tasks) {
    if (t.fixed_values.size() != static_cast<Eigen::Index>(m) || t.free_subset.empty())
      throw DimensionMismatchError("calibrate_many: malformed task");
    targets.emplace_back(model, t, options);
  }

  std::vector<std::size_t> failed(count, 0);
  PointSet rows(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(m));
  std::vector<double> values(count);

  std::vector<AdaptiveMetropolis> chains;
  chains.reserve(count);
  {
    for (std::size_t c = 0; c < count; ++c) targets[c].to_full(targets[c].start(), row_span(rows, static_cast<Eigen::Index>(c)));
    std::size_t start_failures = 0;
    evaluate_tolerant(model, rows, values, start_failures);
    for (std::size_t c = 0; c < count; ++c) {
      if (!std::isfinite(values[c])) ++failed[c];
      chains.emplace_back(targets[c].start(), targets[c].log_density(values[c]), options.mcmc, seeds[c]);
    }
  }

  std::vector<std::size_t> active;
  Vector u;
  for (;;) {
    active.clear();
    for (std::size_t c = 0; c < count; ++c) {
      if (!chains[c].next_request(u)) continue;
      targets[c].to_full(u, row_span(rows, static_cast<Eigen::Index>(active.size())));
      active.push_back(c);
    }
    if (active.empty()) break;
    const PointSet batch = rows.topRows(static_cast<Eigen::Index>(active.size()));
    std::span<double> out(values.data(), active.size());
    std::size_t ignored = 0;
    evaluate_tolerant(model, batch, out, ignored);
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t c = active[i];
      if (!std::isfinite(out[i])) ++failed[c];
      chains[c].submit(targets[c].log_density(out[i]));
    }
  }

  // Fit errors at the best states, recomputed exactly.
  for (std::size_t c = 0; c < count; ++c) targets[c].to_full(chains[c].best(), row_span(rows, static_cast<Eigen::Index>(c)));
  std::size_t ignored = 0;
  evaluate_tolerant(model, rows, values, ignored);

  std::vector<ChainResult> results(count);
  for (std::size_t c = 0; c < count; ++c) {
    const auto& chain = chains[c];
    auto& r = results[c];
    r.acceptance_rate = chain.acceptance_rate();
    r.best_fit = targets[c].to_subset(tasks[c], chain.best());
    const double resid = tasks[c].data_qoi - values[c];
    r.fit_error = std::isfinite(values[c]) ? resid * resid : std::numeric_limits<double>::infinity();
    r.failed_evaluations = failed[c];
    r.samples.reserve(chain.samples().size());
    for (const auto& s : chain.samples()) r.samples.push_back(targets[c].to_subset(tasks[c], s));
  }
  return results;
}

ChainResult calibrate(const QoiModel& model, const CalibrationTask& task, const CalibrationOptions& options,
                      std::uint64_t seed) {
  return calibrate_many(model, std::span<const CalibrationTask>(&task, 1), std::span<const std::uint64_t>(&seed, 1),
                        options)
      .front();
}

const char* winner_name(Winner winner) {
  switch (winner) {
    case Winner::global: return "global";
    case Winner::local: return "local";
    case Winner::tie: return "tie";
  }
  return "?";
}

namespace {

bool same_set(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::uint64_t chain_seed(std::uint64_t region_seed, std::size_t k) { return derive_seed(region_seed, 1 + k); }

}  // namespace

Winner judge(const SubsetComparison& c, double tie_rel) {
  if (same_set(c.global_subset, c.local_subset)) return Winner::tie;
  const double tol = tie_rel * c.data_qoi;
  if (std::abs(c.global_error - c.local_error) <= tol * tol) return Winner::tie;
  return c.local_error < c.global_error ? Winner::local : Winner::global;
}

SubsetComparison compare_subsets(const QoiModel& model, std::size_t region_index, const ParameterSpace& region,
                                 std::size_t k, const Ranking& global_ranking, const Ranking& local_ranking,
                                 const CalibrationOptions& options, std::uint64_t seed) {
  const CalibrationTask g = make_task(model, region_index, region, k, global_ranking, seed);
  CalibrationTask l = g;
  l.free_subset.assign(local_ranking.begin(), local_ranking.begin() + static_cast<std::ptrdiff_t>(k));

  SubsetComparison c;
  c.region_index = region_index;
  c.k = k;
  c.global_subset = g.free_subset;
  c.local_subset = l.free_subset;
  c.data_qoi = g.data_qoi;
  const std::uint64_t s = chain_seed(seed, k);
  c.global_error = calibrate(model, g, options, s).fit_error;
  c.local_error = same_set(g.free_subset, l.free_subset) ? c.global_error : calibrate(model, l, options, s).fit_error;
  c.winner = judge(c, options.tie_rel);
  return c;
}

double WinRates::percent(std::size_t n) const {
  return total() == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total());
}

CalibrationExperiment experiment_sweep(const QoiModel& model, const RegionGrid& grid,
                                       std::span<const RegionRanking> regions, const Ranking& global_ranking,
                                       std::span<const std::size_t> ks, const CalibrationOptions& options,
                                       std::uint64_t seed) {
  options.validate();
  const std::size_t m = model.dim;
  if (grid.space.dim() != m || global_ranking.size() != m)
    throw DimensionMismatchError("experiment_sweep: dimension mismatch");
  for (std::size_t k : ks)
    if (k < 1 || k > m) throw InvalidArgumentError("experiment_sweep: k must lie in [1, m]");

  CalibrationOptions opts = options;
  opts.mcmc.keep_samples = false;

  CalibrationExperiment ex;
  for (std::size_t k : ks) ex.rates.push_back({k, 0, 0, 0});

  constexpr std::size_t kBlock = 128;
  for (std::size_t begin = 0; begin < regions.size(); begin += kBlock) {
    const std::size_t end = std::min(regions.size(), begin + kBlock);

    struct Pending {
      SubsetComparison cmp;
      std::size_t global_chain = 0;
      std::size_t local_chain = 0;
      std::size_t rate_slot = 0;
    };
    std::vector<Pending> pending;
    std::vector<CalibrationTask> tasks;
    std::vector<std::uint64_t> seeds;

    for (std::size_t r = begin; r < end; ++r) {
      const auto& rr = regions[r];
      const std::uint64_t region_seed = derive_seed(seed, rr.region_index);
      CalibrationTask base;
      try {
        if (rr.local.size() != m) throw DimensionMismatchError("local ranking has the wrong length");
        base = make_task(model, rr.region_index, region_bounds(grid, rr.region_index), m, global_ranking, region_seed);
      } catch (const std::exception& e) {
        for (std::size_t k : ks) ex.failures.push_back({rr.region_index, k, e.what()});
        continue;
      }
      for (std::size_t slot = 0; slot < ks.size(); ++slot) {
        const std::size_t k = ks[slot];
        Pending p;
        p.cmp.region_index = rr.region_index;
        p.cmp.k = k;
        p.cmp.global_subset.assign(global_ranking.begin(), global_ranking.begin() + static_cast<std::ptrdiff_t>(k));
        p.cmp.local_subset.assign(rr.local.begin(), rr.local.begin() + static_cast<std::ptrdiff_t>(k));
        p.cmp.data_qoi = base.data_qoi;
        p.rate_slot = slot;

        CalibrationTask t = base;
        t.k = k;
        t.free_subset = p.cmp.global_subset;
        p.global_chain = tasks.size();
        tasks.push_back(t);
        seeds.push_back(chain_seed(region_seed, k));
        if (same_set(p.cmp.global_subset, p.cmp.local_subset)) {
          p.local_chain = p.global_chain;
        } else {
          t.free_subset = p.cmp.local_subset;
          p.local_chain = tasks.size();
          tasks.push_back(t);
          seeds.push_back(chain_seed(region_seed, k));
        }
        pending.push_back(std::move(p));
      }
    }

    const auto results = calibrate_many(model, tasks, seeds, opts);
    for (auto& p : pending) {
      p.cmp.global_error = results[p.global_chain].fit_error;
      p.cmp.local_error = results[p.local_chain].fit_error;
      if (!std::isfinite(p.cmp.global_error) || !std::isfinite(p.cmp.local_error)) {
        ex.failures.push_back({p.cmp.region_index, p.cmp.k, "every model evaluation of a chain failed"});
        continue;
      }
      p.cmp.winner = judge(p.cmp, opts.tie_rel);
      auto& rate = ex.rates[p.rate_slot];
      switch (p.cmp.winner) {
        case Winner::local: ++rate.local; break;
        case Winner::global: ++rate.global; break;
        case Winner::tie: ++rate.ties; break;
      }
      ex.comparisons.push_back(std::move(p.cmp));
    }
  }
  return ex;
}

std::vector<std::size_t> subsample_regions(std::size_t total_regions, std::size_t count, std::uint64_t seed) {
  if (count > total_regions) throw InvalidArgumentError("cannot subsample more regions than the grid holds");
  // Floyd's algorithm.
  Rng rng(seed);
  std::set<std::size_t> chosen;
  for (std::size_t j = total_regions - count; j < total_regions; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace activestab
