#include "metainf/outer_meta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "metainf/errors.hpp"

namespace metainf {

double MetaParams::v_max() const { return std::sqrt(big_d * big_d + alpha * alpha); }

double identification_error(double gap, double delta, double T) {
  return std::exp(-(3.0 / 28.0) * gap * gap * delta * T);
}

DeltaInterval identification_interval(double gap, std::size_t T, std::size_t d) {
  const double lower =
      56.0 * std::log(static_cast<double>(d)) / (3.0 * gap * gap * static_cast<double>(T));
  return {lower, 1.0 / static_cast<double>(d)};
}

double minimal_feasible_T(double gap, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::ceil(56.0 * dd * std::log(dd) / (3.0 * gap * gap));
}

MetaParams compute_params(std::size_t T, std::size_t d, std::size_t S,
                          std::optional<double> gap, const ParamOverrides& o) {
  if (T < 1 || d < 1 || S < 1) throw DomainError("T, d and S must be at least 1");
  if (gap && !(*gap > 0.0)) throw DomainError("gap must be positive");
  const double Td = static_cast<double>(T);
  const double dd = static_cast<double>(d);
  const double Sd = static_cast<double>(S);

  MetaParams p;
  p.d = d;
  p.T = T;
  p.S = S;
  p.gap = gap;
  p.sigma = problem_scale(Td, dd);

  if (gap) {
    const auto interval = identification_interval(*gap, T, d);
    if (o.delta) {
      p.delta = *o.delta;
      const bool inside = p.delta >= interval.lower && p.delta <= interval.upper;
      if (!inside) {
        if (!o.force || p.delta > interval.upper || p.delta < 0.0) {
          std::ostringstream msg;
          msg << "delta = " << p.delta << " outside identification interval [" << interval.lower
              << ", " << interval.upper << "]; minimal feasible T = "
              << minimal_feasible_T(*gap, d);
          throw InfeasibleParamsError(msg.str(), minimal_feasible_T(*gap, d));
        }
        p.assumption_violated = true;
      }
    } else if (interval.feasible()) {
      const double raw = o.c_delta / (std::pow(*gap, 4.0 / 7.0) * std::pow(Td, 4.0 / 7.0) *
                                      std::pow(dd, 3.0 / 7.0));
      p.delta = std::clamp(raw, interval.lower, interval.upper);
    } else if (o.force) {
      p.delta = interval.upper;
      p.assumption_violated = true;
    } else {
      std::ostringstream msg;
      msg << "identification interval is empty for T = " << T << " (lower limit "
          << interval.lower << " > 1/d = " << interval.upper << "); minimal feasible T = "
          << minimal_feasible_T(*gap, d);
      throw InfeasibleParamsError(msg.str(), minimal_feasible_T(*gap, d));
    }
    p.eps_delta = identification_error(*gap, p.delta, Td);
    // Forced runs outside the interval carry no identification guarantee.
    if (p.assumption_violated && dd * p.eps_delta >= 1.0) p.eps_delta = 0.0;
  } else {
    p.delta = o.delta.value_or(o.c_delta / (std::pow(Td, 4.0 / 7.0) * std::pow(dd, 3.0 / 7.0)));
    p.delta = std::min(p.delta, 1.0 / dd);
    p.eps_delta = 0.0;
  }
  if (!(p.delta >= 0.0) || p.delta > 1.0 / dd + 1e-12)
    throw InfeasibleParamsError("delta outside [0, 1/d]", gap ? minimal_feasible_T(*gap, d) : 0.0);
  if (p.delta == 0.0) throw InfeasibleParamsError("delta must be positive", 0.0);

  const double keep = p.one_minus_d_eps();
  if (!(keep > 0.0)) {
    throw InfeasibleParamsError("d * eps_delta >= 1: identification bound is vacuous",
                                gap ? minimal_feasible_T(*gap, d) : 0.0);
  }
  const double root_keep = std::sqrt(keep);
  const double delta_quarter = std::pow(p.delta, 0.25);

  if (o.alpha) {
    if (!(*o.alpha > 0.0)) throw DomainError("alpha must be positive");
    p.alpha = *o.alpha;
  } else {
    const double num = 2.0 * std::numbers::sqrt2 * (std::log(Sd + 1.0) + 1.0);
    const double den = Sd * keep * root_keep * delta_quarter * delta_quarter * delta_quarter;
    p.alpha = o.c_alpha * std::cbrt(num / den);
  }
  p.big_d = std::numbers::sqrt2 / (root_keep * delta_quarter);
  p.gamma = 2.0 / (p.sigma * p.big_d) * std::min(p.alpha * p.alpha / (p.big_d * p.big_d), 1.0);
  return p;
}

double regularized_lr_loss(double v, double divergence, const MetaParams& params) {
  if (!(v > 0.0)) throw DomainError("v must be positive");
  const double a2 = params.alpha * params.alpha;
  return params.sigma * ((divergence / params.one_minus_d_eps() + a2) / v + v);
}

namespace {

struct Pair {
  double n;  // integral of the weight
  double m;  // integral of v times the weight
};

Pair operator+(Pair a, Pair b) { return {a.n + b.n, a.m + b.m}; }
Pair operator-(Pair a, Pair b) { return {a.n - b.n, a.m - b.m}; }
Pair operator*(double s, Pair a) { return {s * a.n, s * a.m}; }

class ShiftedWeight {
 public:
  ShiftedWeight(double a, double b, double gamma, double shift)
      : a_(a), b_(b), gamma_(gamma), shift_(shift) {}

  Pair operator()(double v) const {
    const double e = std::exp(-gamma_ * (a_ / v + b_ * v - shift_));
    return {e, v * e};
  }

 private:
  double a_, b_, gamma_, shift_;
};

struct Simpson {
  const ShiftedWeight& f;
  int max_depth;
  double unresolved_n = 0.0;
  double unresolved_m = 0.0;

  Pair refine(double a, double b, Pair fa, Pair fm, Pair fb, Pair whole, double tol_n,
              double tol_m, int depth) {
    const double c = 0.5 * (a + b);
    const double l = 0.5 * (a + c);
    const double r = 0.5 * (c + b);
    const Pair fl = f(l);
    const Pair fr = f(r);
    const Pair left = ((c - a) / 6.0) * (fa + 4.0 * fl + fm);
    const Pair right = ((b - c) / 6.0) * (fm + 4.0 * fr + fb);
    const Pair diff = left + right - whole;
    const bool ok = std::abs(diff.n) <= 15.0 * tol_n && std::abs(diff.m) <= 15.0 * tol_m;
    if (ok || depth >= max_depth) {
      if (!ok) {
        unresolved_n += std::abs(diff.n) / 15.0;
        unresolved_m += std::abs(diff.m) / 15.0;
      }
      return left + right + (1.0 / 15.0) * diff;
    }
    return refine(a, c, fa, fl, fm, left, 0.5 * tol_n, 0.5 * tol_m, depth + 1) +
           refine(c, b, fm, fr, fb, right, 0.5 * tol_n, 0.5 * tol_m, depth + 1);
  }
};

}  // namespace

EwooMean ewoo_weighted_mean(double A, double B, double gamma, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("EWOO domain must be 0 < lo < hi");
  if (A == 0.0 && B == 0.0) return {0.5 * (lo + hi), 0.0};

  constexpr int kProbes = 64;
  constexpr double kRelTol = 1e-8;
  constexpr int kMaxDepth = 20;

  auto loss = [&](double v) { return A / v + B * v; };
  // The cumulative loss is convex in v; its exact minimiser on [lo, hi] is
  // the clamped stationary point. The probes only guard against rounding.
  double v_star = B > 0.0 ? std::sqrt(A / B) : hi;
  v_star = std::clamp(v_star, lo, hi);
  double shift = loss(v_star);
  for (int k = 0; k <= kProbes; ++k) shift = std::min(shift, loss(lo + (hi - lo) * k / kProbes));

  const ShiftedWeight f(A, B, gamma, shift);

  std::vector<double> cuts;
  cuts.reserve(kProbes + 2);
  for (int k = 0; k <= kProbes; ++k) cuts.push_back(lo + (hi - lo) * k / kProbes);
  cuts.back() = hi;
  cuts.push_back(v_star);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // First pass: plain Simpson per panel, to scale the absolute tolerances.
  std::vector<Pair> fa(cuts.size());
  for (std::size_t k = 0; k < cuts.size(); ++k) fa[k] = f(cuts[k]);
  std::vector<Pair> mids(cuts.size() - 1);
  std::vector<Pair> wholes(cuts.size() - 1);
  Pair coarse{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    mids[k] = f(0.5 * (cuts[k] + cuts[k + 1]));
    wholes[k] = ((cuts[k + 1] - cuts[k]) / 6.0) * (fa[k] + 4.0 * mids[k] + fa[k + 1]);
    coarse = coarse + wholes[k];
  }

  // The tolerance is relative to the integral itself; a coarse estimate that
  // smears a narrow peak overshoots, so re-run against the refined value.
  Pair scale = coarse;
  Pair total{0.0, 0.0};
  double unresolved_n = 0.0;
  double unresolved_m = 0.0;
  const double width = hi - lo;
  for (int pass = 0; pass < 3; ++pass) {
    Simpson simpson{f, kMaxDepth};
    total = {0.0, 0.0};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double share = (cuts[k + 1] - cuts[k]) / width;
      total = total + simpson.refine(cuts[k], cuts[k + 1], fa[k], mids[k], fa[k + 1], wholes[k],
                                     kRelTol * scale.n * share, kRelTol * scale.m * share, 0);
    }
    unresolved_n = simpson.unresolved_n;
    unresolved_m = simpson.unresolved_m;
    if (total.n >= 0.5 * scale.n && total.m >= 0.5 * scale.m) break;
    scale = total;
  }
  if (!(total.n > 0.0)) throw NumericalError("EWOO normaliser vanished", 1.0);
  const double achieved = std::max(unresolved_n / total.n, unresolved_m / total.m);
  if (achieved > kRelTol) {
    throw NumericalError("EWOO quadrature reached only relative tolerance " +
                             std::to_string(achieved),
                         achieved);
  }
  return {std::clamp(total.m / total.n, lo, hi), achieved};
}

double eps_ewoo_predict(const LrMetaState& state) {
  const MetaParams& p = state.params;
  const double lo = p.v_min();
  const double hi = p.v_max();
  if (state.episode_count == 0) return 0.5 * (lo + hi) / p.sigma;
  const EwooMean mean =
      ewoo_weighted_mean(state.inverse_coeff, state.linear_coeff, p.gamma, lo, hi);
  return mean.v_bar / p.sigma;
}

LrMetaState eps_ewoo_update(LrMetaState state, double divergence) {
  if (!(divergence >= 0.0)) throw DomainError("divergence must be non-negative");
  const MetaParams& p = state.params;
  state.inverse_coeff += p.sigma * (divergence / p.one_minus_d_eps() + p.alpha * p.alpha);
  state.linear_coeff += p.sigma;
  ++state.episode_count;
  return state;
}

Distribution ftl_predict(const InitMetaState& state, const TruncationLevel& trunc) {
  if (state.best_arm_counts.size() != trunc.d) throw DomainError("FTL dimension mismatch");
  if (state.episode_count == 0) return Distribution::uniform(trunc.d);
  const double mass = 1.0 - static_cast<double>(trunc.d) * trunc.delta;
  const double n = static_cast<double>(state.episode_count);
  std::vector<double> phi(trunc.d);
  for (std::size_t i = 0; i < trunc.d; ++i)
    phi[i] = trunc.delta + mass * static_cast<double>(state.best_arm_counts[i]) / n;
  return Distribution::trusted(std::move(phi));
}

InitMetaState ftl_update(InitMetaState state, std::size_t est_best) {
  if (est_best >= state.best_arm_counts.size())
    throw DomainError("estimated best arm " + std::to_string(est_best) + " out of range");
  ++state.best_arm_counts[est_best];
  ++state.episode_count;
  return state;
}

}  // namespace metainf
