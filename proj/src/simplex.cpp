#include "metainf/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "metainf/errors.hpp"

namespace metainf {

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw DomainError("distribution over zero arms");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("distribution weight " + std::to_string(w) + " is not a probability");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance)
    throw DomainError("distribution weights sum to " + std::to_string(sum));
}

Distribution Distribution::uniform(std::size_t d) {
  if (d == 0) throw DomainError("distribution over zero arms");
  return Distribution(std::vector<double>(d, 1.0 / static_cast<double>(d)), Unchecked{});
}

Distribution Distribution::one_hot(std::size_t d, std::size_t i) {
  if (i >= d) throw DomainError("arm index out of range");
  std::vector<double> w(d, 0.0);
  w[i] = 1.0;
  return Distribution(std::move(w), Unchecked{});
}

Distribution Distribution::trusted(std::vector<double> weights) {
  return Distribution(std::move(weights), Unchecked{});
}

bool Distribution::in_truncated(double delta, double tol) const noexcept {
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double w) { return w >= delta - tol; });
}

TruncationLevel::TruncationLevel(double delta_, std::size_t d_) : delta(delta_), d(d_) {
  if (d == 0) throw DomainError("truncation over zero arms");
  if (!(delta >= 0.0) || delta * static_cast<double>(d) > 1.0 + 1e-12)
    throw DomainError("truncation level " + std::to_string(delta) + " outside [0, 1/" +
                      std::to_string(d) + "]");
}

namespace {

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("Tsallis parameter q must lie in (0,1)");
}

}  // namespace

double tsallis_entropy(double q, const Distribution& x) {
  check_q(q);
  double s = 0.0;
  for (double xi : x.weights()) s += std::pow(xi, q);
  return std::max(0.0, (s - 1.0) / (q * (1.0 - q)));
}

double beta_divergence(double q, const Distribution& x, const Distribution& y) {
  check_q(q);
  if (x.size() != y.size()) throw DomainError("divergence between different dimensions");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    if (yi == 0.0) {
      if (xi > 0.0)
        throw SingularInputError("beta divergence reference has zero mass at arm " +
                                 std::to_string(i));
      continue;
    }
    s += (1.0 - q) * std::pow(yi, q) + q * xi / std::pow(yi, 1.0 - q) - std::pow(xi, q);
  }
  return std::max(0.0, s / (q * (1.0 - q)));
}

Distribution mix_with_uniform(std::size_t i, const TruncationLevel& trunc) {
  if (i >= trunc.d) throw DomainError("arm index out of range");
  std::vector<double> w(trunc.d, trunc.delta);
  w[i] = 1.0 - static_cast<double>(trunc.d - 1) * trunc.delta;
  return Distribution::trusted(std::move(w));
}

double problem_scale(double T, double d) {
  return std::sqrt(T) * std::pow(d, 0.25) / std::sqrt(2.0);
}

Distribution bregman_project_truncated(const Distribution& y, const TruncationLevel& trunc) {
  if (y.size() != trunc.d) throw DomainError("projection dimension mismatch");
  if (y.in_truncated(trunc.delta, 0.0)) return y;
  std::vector<double> zero(trunc.d, 0.0);
  std::vector<double> out(trunc.d);
  tsallis_mirror_step(0.5, y.weights(), zero, trunc.delta, out);
  return Distribution::trusted(std::move(out));
}

namespace {

struct SumAndSlope {
  double sum;
  double slope;
};

// Sum of x_i(lambda) - 1 and its derivative in lambda.
inline SumAndSlope evaluate(double q, std::span<const double> w, double delta, double lambda) {
  double sum = -1.0;
  double slope = 0.0;
  const bool half = (q == 0.5);
  const double p = 1.0 / (1.0 - q);
  for (double wi : w) {
    if (!std::isfinite(wi)) {
      sum += delta;
      continue;
    }
    const double z = wi + lambda;
    double x;
    double dx;
    if (half) {
      const double r = 2.0 / z;
      x = r * r;
      dx = -2.0 * x / z;
    } else {
      x = std::pow((1.0 - q) * z, -p);
      dx = -p * x / z;
    }
    if (x <= delta) {
      sum += delta;
    } else {
      sum += x;
      slope += dx;
    }
  }
  return {sum, slope};
}

inline double coordinate(double q, double wi, double delta, double lambda) {
  if (!std::isfinite(wi)) return delta;
  const double z = wi + lambda;
  const double x = (q == 0.5) ? 4.0 / (z * z) : std::pow((1.0 - q) * z, -1.0 / (1.0 - q));
  return std::max(delta, x);
}

}  // namespace

MirrorStepStats tsallis_mirror_step(double q, std::span<const double> prev,
                                    std::span<const double> scaled_loss, double delta,
                                    std::span<double> out, double lambda_hint, bool use_hint) {
  check_q(q);
  const std::size_t d = prev.size();
  if (scaled_loss.size() != d || out.size() != d)
    throw DomainError("mirror step dimension mismatch");
  if (!(delta >= 0.0) || delta * static_cast<double>(d) > 1.0 + 1e-12)
    throw DomainError("truncation level outside [0, 1/d]");

  if (delta * static_cast<double>(d) >= 1.0 - 1e-12) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(d));
    return {};
  }

  // Small fixed-size buffer keeps the hot path allocation-free for d <= 64.
  constexpr std::size_t kInline = 64;
  double inline_w[kInline];
  std::vector<double> heap_w;
  std::span<double> w;
  if (d <= kInline) {
    w = std::span<double>(inline_w, d);
  } else {
    heap_w.resize(d);
    w = heap_w;
  }

  double w_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    if (!(prev[i] > 0.0)) {
      w[i] = std::numeric_limits<double>::infinity();
    } else if (q == 0.5) {
      w[i] = 2.0 / std::sqrt(prev[i]) + scaled_loss[i];
    } else {
      w[i] = std::pow(prev[i], q - 1.0) / (1.0 - q) + scaled_loss[i];
    }
    w_min = std::min(w_min, w[i]);
  }

  constexpr double kTol = 1e-13;
  constexpr int kMaxIter = 200;

  // f(lo) > 0 always holds at the pole; hi is unknown until we see f < 0.
  double lo = -w_min;
  double hi = std::numeric_limits<double>::infinity();
  // At lambda = 1/(1-q) - w_min the smallest-w coordinate equals 1, so f >= 0.
  double lambda = 1.0 / (1.0 - q) - w_min;
  if (use_hint && lambda_hint > lo && std::isfinite(lambda_hint)) lambda = lambda_hint;

  SumAndSlope f{};
  int it = 0;
  for (; it < kMaxIter; ++it) {
    f = evaluate(q, w, delta, lambda);
    if (std::abs(f.sum) <= kTol) break;
    if (f.sum > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    double next = (f.slope < 0.0) ? lambda - f.sum / f.slope
                                  : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : lambda + 2.0 * (std::abs(lambda) + 1.0);
    }
    if (next == lambda) break;
    lambda = next;
  }

  if (!(std::abs(f.sum) <= 1e-12)) {
    throw NumericalError("mirror step did not normalise: |sum - 1| = " +
                             std::to_string(std::abs(f.sum)),
                         std::abs(f.sum));
  }

  double free_mass = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = coordinate(q, w[i], delta, lambda);
    if (out[i] > delta) free_mass += out[i];
  }
  // Push the sub-1e-12 residual into the unclipped coordinates.
  const double residual = f.sum;
  if (free_mass > 0.0 && residual != 0.0) {
    for (std::size_t i = 0; i < d; ++i) {
      if (out[i] > delta) out[i] = std::max(delta, out[i] - residual * out[i] / free_mass);
    }
  }
  return {lambda, std::abs(residual), it + 1};
}

}  // namespace metainf
