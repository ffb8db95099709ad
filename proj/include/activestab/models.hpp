// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "activestab/sampling.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace activestab {

using ScalarFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<void(std::span<const double>, std::span<double>)>;
/// Evaluates every row of a point set; must agree bit-for-bit with row-wise evaluation.
using BatchFunction = std::function<void(const PointSet&, std::span<double>)>;

/// A scalar quantity of interest over R^m, with an optional analytic gradient
/// (expressed in the model's own, unscaled coordinates).
struct QoiModel {
  std::string name;
  std::size_t dim = 0;
  ScalarFunction evaluate;
  GradientFunction analytic_gradient;
  /// Admissible box the model is studied on.
  ParameterSpace space;
  /// Optional vectorised evaluation; evaluate_rows falls back to a loop without it.
  BatchFunction evaluate_batch;

  bool has_analytic_gradient() const noexcept { return static_cast<bool>(analytic_gradient); }
  double operator()(std::span<const double> x) const { return evaluate(x); }
  void evaluate_rows(const PointSet& points, std::span<double> out) const;
};

// -- analytic test functions on [0,1]^2 -------------------------------------------

double eval_f1(std::span<const double> x);
double eval_f2(std::span<const double> x);
double eval_f3(std::span<const double> x);
void grad_f1(std::span<const double> x, std::span<double> g);
void grad_f2(std::span<const double> x, std::span<double> g);
void grad_f3(std::span<const double> x, std::span<double> g);

// -- competitive Lotka-Volterra tumour model --------------------------------------

struct LvParams {
  double r_S = 0.0;      ///< Type-S growth rate (1/day)
  double r_R = 0.0;      ///< Type-R growth rate (1/day)
  double K_S = 1.0;      ///< Type-S carrying capacity (mm^3)
  double K_R = 1.0;      ///< Type-R carrying capacity (mm^3)
  double gamma_S = 0.0;  ///< effect of S on R
  double gamma_R = 0.0;  ///< effect of R on S

  static LvParams from_vector(std::span<const double> x);
  std::array<double, 6> to_array() const { return {r_S, r_R, K_S, K_R, gamma_S, gamma_R}; }
};

struct LvState {
  double S = 0.0;
  double R = 0.0;
  double t = 0.0;
};

struct LvDerivative {
  double dS = 0.0;
  double dR = 0.0;
};

inline constexpr double kLvInitialS = 0.018;
inline constexpr double kLvInitialR = 0.002;
inline constexpr double kLvDefaultDt = 0.05;
inline constexpr int kLvObservationDays = 56;

/// Right-hand side of the two-population competition system.
/// Throws DegenerateParameterError when a carrying capacity is not positive.
LvDerivative lv_rhs(const LvState& state, const LvParams& params);

/// Classical RK4 from (S, R) = (0.018, 0.002), sampled at integer days 0..t_end_days.
///
/// Each step of size dt is split into equal RK4 sub-steps whenever the Gershgorin
/// bound of the local Jacobian times dt exceeds 1/2; this only triggers for carrying
/// capacities far below the current volume and keeps trajectories nonnegative there.
/// Volumes below 1e-200 are set to zero (extinct).
std::vector<LvState> lv_solve(const LvParams& params, int t_end_days, double dt = kLvDefaultDt);

/// Trapezoidal integral of S + R over the 57 daily samples of a 56-day run.
double lv_qoi(const LvParams& params, double dt = kLvDefaultDt);

/// lv_qoi for many parameter sets, integrated in lockstep lanes. Each result is
/// bit-identical to the corresponding scalar lv_qoi call.
void lv_qoi_batch(std::span<const LvParams> params, std::span<double> out, double dt = kLvDefaultDt);

const std::vector<std::string>& lv_parameter_names();

// -- registry -------------------------------------------------------------------

/// "f1", "f2", "f3" or "lotka-volterra". Throws InvalidArgumentError for anything else.
QoiModel make_model(std::string_view name);
std::vector<std::string> model_names();

}  // namespace activestab
