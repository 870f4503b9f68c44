#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "metainf/simplex.hpp"

namespace metainf {

// Hyperparameter bundle of one Meta-INF run.
struct MetaParams {
  double delta = 0.0;      // exploration floor
  double alpha = 0.0;      // EWOO regulariser
  double big_d = 0.0;      // EWOO domain size D
  double gamma = 0.0;      // EWOO temperature
  double sigma = 0.0;      // problem scale
  double eps_delta = 0.0;  // per-arm misidentification bound
  std::size_t d = 0;
  std::size_t T = 0;
  std::size_t S = 0;
  std::optional<double> gap;
  // Set when an override pushed delta outside the identification interval.
  bool assumption_violated = false;

  double one_minus_d_eps() const { return 1.0 - static_cast<double>(d) * eps_delta; }
  TruncationLevel trunc() const { return TruncationLevel(delta, d); }
  double v_min() const { return alpha; }
  double v_max() const;
};

// Optional pins on top of the default parameter formulas.
struct ParamOverrides {
  std::optional<double> delta;
  std::optional<double> alpha;
  double c_delta = 1.0;
  double c_alpha = 1.0;
  // Accept delta outside the identification interval (flags the result).
  bool force = false;
};

// exp(-(3/28) gap^2 delta T).
double identification_error(double gap, double delta, double T);

// Interval [56 ln d / (3 gap^2 T), 1/d] on delta that keeps d^2 eps <= 1.
struct DeltaInterval {
  double lower;
  double upper;
  bool feasible() const { return lower <= upper; }
};
DeltaInterval identification_interval(double gap, std::size_t T, std::size_t d);
// Smallest T for which the interval is non-empty (delta = 1/d).
double minimal_feasible_T(double gap, std::size_t d);

// delta = c_delta / (gap^(4/7) T^(4/7) d^(3/7)) clamped into the identification
// interval (or c_delta / (T^(4/7) d^(3/7)) without a gap), then
//   alpha = c_alpha * cbrt(2 sqrt2 (ln(S+1) + 1) / (S (1-d eps)^(3/2) delta^(3/4)))
//   D     = sqrt2 / (sqrt(1-d eps) delta^(1/4))
//   gamma = 2/(sigma D) * min(alpha^2/D^2, 1).
// Throws InfeasibleParamsError if the interval is empty or d eps >= 1.
MetaParams compute_params(std::size_t T, std::size_t d, std::size_t S,
                          std::optional<double> gap, const ParamOverrides& overrides = {});
inline MetaParams compute_params(std::size_t T, std::size_t d, std::size_t S,
                                 std::optional<double> gap, double c_delta, double c_alpha) {
  ParamOverrides o;
  o.c_delta = c_delta;
  o.c_alpha = c_alpha;
  return compute_params(T, d, S, gap, o);
}

// sigma ((divergence/(1 - d eps) + alpha^2)/v + v).
double regularized_lr_loss(double v, double divergence, const MetaParams& params);

// Learning-rate learner state. The accumulated regularised losses are
// A/v + B v; only the two coefficients are stored.
struct LrMetaState {
  explicit LrMetaState(MetaParams p) : params(std::move(p)) {}

  double inverse_coeff = 0.0;  // A
  double linear_coeff = 0.0;   // B
  std::size_t episode_count = 0;
  MetaParams params;
};

struct EwooMean {
  double v_bar;
  double achieved_tolerance;  // estimated relative quadrature error
};

// Weighted mean of v over [lo, hi] under exp(-gamma (A/v + B v)).
// Adaptive Simpson on the integrand shifted by its exact minimum; throws
// NumericalError if 20 refinement levels do not reach relative 1e-8.
EwooMean ewoo_weighted_mean(double inverse_coeff, double linear_coeff, double gamma, double lo,
                            double hi);

// eta_s = v_bar / sigma; for an empty history v_bar is the interval midpoint.
double eps_ewoo_predict(const LrMetaState& state);
LrMetaState eps_ewoo_update(LrMetaState state, double divergence);

// Initialisation learner: histogram of estimated best arms.
struct InitMetaState {
  explicit InitMetaState(std::size_t d) : best_arm_counts(d, 0) {}

  std::vector<std::size_t> best_arm_counts;
  std::size_t episode_count = 0;
};

// Running average of e_j^delta over observed arms; uniform before any.
Distribution ftl_predict(const InitMetaState& state, const TruncationLevel& trunc);
InitMetaState ftl_update(InitMetaState state, std::size_t est_best);

}  // namespace metainf
