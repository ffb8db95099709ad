// SPDX-License-Identifier: Apache-2.0
#include "activestab/models.hpp"

#include "activestab/error.hpp"

#include <algorithm>
#include <cmath>

namespace activestab {

double eval_f1(std::span<const double> x) { return std::exp(0.7 * x[0] + 0.3 * x[1]); }

double eval_f2(std::span<const double> x) { return x[0] * std::exp(0.7 * x[0] + 0.3 * x[1]); }

double eval_f3(std::span<const double> x) { return std::exp(0.7 * x[0] * x[0] * x[1] + 0.3 * x[1]); }

void grad_f1(std::span<const double> x, std::span<double> g) {
  const double f = eval_f1(x);
  g[0] = 0.7 * f;
  g[1] = 0.3 * f;
}

void grad_f2(std::span<const double> x, std::span<double> g) {
  const double e = std::exp(0.7 * x[0] + 0.3 * x[1]);
  g[0] = (1.0 + 0.7 * x[0]) * e;
  g[1] = 0.3 * x[0] * e;
}

void grad_f3(std::span<const double> x, std::span<double> g) {
  const double f = eval_f3(x);
  g[0] = 1.4 * x[0] * x[1] * f;
  g[1] = (0.7 * x[0] * x[0] + 0.3) * f;
}

LvParams LvParams::from_vector(std::span<const double> x) {
  if (x.size() != 6) throw DimensionMismatchError("Lotka-Volterra model takes 6 parameters");
  return {x[0], x[1], x[2], x[3], x[4], x[5]};
}

namespace {

void check_capacities(const LvParams& p) {
  if (!(p.K_S > 0.0) || !(p.K_R > 0.0))
    throw DegenerateParameterError("carrying capacities must be positive (K_S=" + std::to_string(p.K_S) +
                                   ", K_R=" + std::to_string(p.K_R) + ")");
}

// Sub-step limits on (Jacobian row bound) * h: stability over every row, accuracy over rows whose
// population is still at least kSignificant of its carrying capacity.
constexpr double kStabilityLimit = 0.5;
constexpr double kAccuracyLimit = 0.125;
constexpr double kSignificant = 1e-3;
constexpr double kExtinct = 1e-200;

int steps_per_day(double dt) {
  if (!(dt > 0.0) || dt > 1.0) throw InvalidArgumentError("time step must lie in (0, 1] day");
  const double n = std::round(1.0 / dt);
  if (std::abs(n * dt - 1.0) > 1e-12) throw InvalidArgumentError("time step must divide one day evenly");
  return static_cast<int>(n);
}

/// W trajectories advanced in lockstep. Every lane performs exactly the scalar
/// arithmetic sequence, so results do not depend on which lanes share a block.
template <int W>
class LaneBlock {
 public:
  LaneBlock(const LvParams* p, int n) {
    for (int l = 0; l < W; ++l) {
      const LvParams& q = p[l < n ? l : n - 1];
      check_capacities(q);
      rS_[l] = q.r_S;
      rR_[l] = q.r_R;
      iKS_[l] = 1.0 / q.K_S;
      iKR_[l] = 1.0 / q.K_R;
      gS_[l] = q.gamma_S;
      gR_[l] = q.gamma_R;
      S[l] = kLvInitialS;
      R[l] = kLvInitialR;
    }
  }

  void step(double dt) {
    int nsub[W];
    double h[W];
    int max_sub = 1;
    for (int l = 0; l < W; ++l) {
      const double need =
          std::max(stiffness(l, false) * dt / kStabilityLimit, stiffness(l, true) * dt / kAccuracyLimit);
      nsub[l] = need <= 1.0 ? 1 : static_cast<int>(std::ceil(need));
      h[l] = dt / nsub[l];
      max_sub = std::max(max_sub, nsub[l]);
    }
    if (max_sub == 1) {
      rk4(h, nullptr, 0);
    } else {
      for (int s = 0; s < max_sub; ++s) rk4(h, nsub, s);
    }
    for (int l = 0; l < W; ++l) {
      if (S[l] < kExtinct) S[l] = 0.0;
      if (R[l] < kExtinct) R[l] = 0.0;
    }
  }

  double S[W];
  double R[W];

 private:
  double fS(int l, double s, double r) const { return rS_[l] * s * (1.0 - s * iKS_[l] - gR_[l] * r * iKS_[l]); }
  double fR(int l, double s, double r) const { return rR_[l] * r * (1.0 - r * iKR_[l] - gS_[l] * s * iKR_[l]); }

  // Gershgorin bound on the Jacobian's spectrum at the current state, optionally over significant rows only.
  double stiffness(int l, bool significant_only) const {
    const double j11 = rS_[l] * (1.0 - 2.0 * S[l] * iKS_[l] - gR_[l] * R[l] * iKS_[l]);
    const double j12 = rS_[l] * gR_[l] * S[l] * iKS_[l];
    const double j21 = rR_[l] * gS_[l] * R[l] * iKR_[l];
    const double j22 = rR_[l] * (1.0 - 2.0 * R[l] * iKR_[l] - gS_[l] * S[l] * iKR_[l]);
    const double row_s = !significant_only || S[l] * iKS_[l] >= kSignificant ? std::abs(j11) + j12 : 0.0;
    const double row_r = !significant_only || R[l] * iKR_[l] >= kSignificant ? j21 + std::abs(j22) : 0.0;
    return std::max(row_s, row_r);
  }

  // One RK4 step per lane; with a sub-step mask, lanes whose count is exhausted keep their state.
  void rk4(const double* h, const int* nsub, int sub) {
    double k1s[W], k1r[W], k2s[W], k2r[W], k3s[W], k3r[W], k4s[W], k4r[W];
    for (int l = 0; l < W; ++l) {
      k1s[l] = fS(l, S[l], R[l]);
      k1r[l] = fR(l, S[l], R[l]);
    }
    for (int l = 0; l < W; ++l) {
      const double s = S[l] + 0.5 * h[l] * k1s[l];
      const double r = R[l] + 0.5 * h[l] * k1r[l];
      k2s[l] = fS(l, s, r);
      k2r[l] = fR(l, s, r);
    }
    for (int l = 0; l < W; ++l) {
      const double s = S[l] + 0.5 * h[l] * k2s[l];
      const double r = R[l] + 0.5 * h[l] * k2r[l];
      k3s[l] = fS(l, s, r);
      k3r[l] = fR(l, s, r);
    }
    for (int l = 0; l < W; ++l) {
      const double s = S[l] + h[l] * k3s[l];
      const double r = R[l] + h[l] * k3r[l];
      k4s[l] = fS(l, s, r);
      k4r[l] = fR(l, s, r);
    }
    for (int l = 0; l < W; ++l) {
      const double s = S[l] + h[l] / 6.0 * (k1s[l] + 2.0 * k2s[l] + 2.0 * k3s[l] + k4s[l]);
      const double r = R[l] + h[l] / 6.0 * (k1r[l] + 2.0 * k2r[l] + 2.0 * k3r[l] + k4r[l]);
      const bool active = nsub == nullptr || sub < nsub[l];
      S[l] = active ? s : S[l];
      R[l] = active ? r : R[l];
    }
  }

  double rS_[W], rR_[W], iKS_[W], iKR_[W], gS_[W], gR_[W];
};

constexpr int kLanes = 4;

template <int W>
void qoi_block(const LvParams* p, int n, double dt, int per_day, double* out) {
  LaneBlock<W> block(p, n);
  double sum[W];
  for (int l = 0; l < W; ++l) sum[l] = 0.5 * (block.S[l] + block.R[l]);
  for (int day = 1; day <= kLvObservationDays; ++day) {
    for (int step = 0; step < per_day; ++step) block.step(dt);
    const double weight = day == kLvObservationDays ? 0.5 : 1.0;
    for (int l = 0; l < W; ++l) sum[l] += weight * (block.S[l] + block.R[l]);
  }
  for (int l = 0; l < n; ++l) out[l] = sum[l];
}

}  // namespace

LvDerivative lv_rhs(const LvState& state, const LvParams& params) {
  check_capacities(params);
  const double S = state.S;
  const double R = state.R;
  return {params.r_S * S * (1.0 - S / params.K_S - params.gamma_R * R / params.K_S),
          params.r_R * R * (1.0 - R / params.K_R - params.gamma_S * S / params.K_R)};
}

std::vector<LvState> lv_solve(const LvParams& params, int t_end_days, double dt) {
  if (t_end_days < 1) throw InvalidArgumentError("t_end must be a positive number of days");
  const int per_day = steps_per_day(dt);
  LaneBlock<1> block(&params, 1);
  std::vector<LvState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(t_end_days) + 1);
  trajectory.push_back({block.S[0], block.R[0], 0.0});
  for (int day = 1; day <= t_end_days; ++day) {
    for (int step = 0; step < per_day; ++step) block.step(dt);
    trajectory.push_back({block.S[0], block.R[0], static_cast<double>(day)});
  }
  return trajectory;
}

double lv_qoi(const LvParams& params, double dt) {
  double out = 0.0;
  qoi_block<1>(&params, 1, dt, steps_per_day(dt), &out);
  return out;
}

void lv_qoi_batch(std::span<const LvParams> params, std::span<double> out, double dt) {
  if (out.size() != params.size()) throw DimensionMismatchError("lv_qoi_batch: output size mismatch");
  const int per_day = steps_per_day(dt);
  std::size_t i = 0;
  for (; i + kLanes <= params.size(); i += kLanes) qoi_block<kLanes>(&params[i], kLanes, dt, per_day, &out[i]);
  const auto rest = static_cast<int>(params.size() - i);
  if (rest > 0) qoi_block<kLanes>(&params[i], rest, dt, per_day, &out[i]);
}

void QoiModel::evaluate_rows(const PointSet& points, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(points.rows()))
    throw DimensionMismatchError("evaluate_rows: output size mismatch");
  if (evaluate_batch) {
    evaluate_batch(points, out);
    return;
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = evaluate(row_span(points, i));
}

const std::vector<std::string>& lv_parameter_names() {
  static const std::vector<std::string> names{"r_S", "r_R", "K_S", "K_R", "gamma_S", "gamma_R"};
  return names;
}

QoiModel make_model(std::string_view name) {
  const ParameterSpace unit2 = ParameterSpace::unit(2);
  if (name == "f1") return {"f1", 2, eval_f1, grad_f1, unit2, {}};
  if (name == "f2") return {"f2", 2, eval_f2, grad_f2, unit2, {}};
  if (name == "f3") return {"f3", 2, eval_f3, grad_f3, unit2, {}};
  if (name == "lotka-volterra") {
    ParameterSpace box(lv_parameter_names(), std::vector<double>(6, 0.0), std::vector<double>(6, 1.0));
    auto eval = [](std::span<const double> x) { return lv_qoi(LvParams::from_vector(x)); };
    auto batch = [](const PointSet& points, std::span<double> out) {
      std::vector<LvParams> params(static_cast<std::size_t>(points.rows()));
      for (Eigen::Index i = 0; i < points.rows(); ++i)
        params[static_cast<std::size_t>(i)] = LvParams::from_vector(row_span(points, i));
      lv_qoi_batch(params, out);
    };
    return {"lotka-volterra", 6, eval, {}, std::move(box), batch};
  }
  throw InvalidArgumentError("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> model_names() { return {"f1", "f2", "f3", "lotka-volterra"}; }

}  // namespace activestab
