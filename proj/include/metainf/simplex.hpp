#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace metainf {

// Simplex construction tolerance on |sum - 1|.
inline constexpr double kSimplexTolerance = 1e-9;

// A point on the probability simplex over d arms.
class Distribution {
 public:
  // Throws DomainError on negative weights or |sum - 1| > kSimplexTolerance.
  explicit Distribution(std::vector<double> weights);

  static Distribution uniform(std::size_t d);
  static Distribution one_hot(std::size_t d, std::size_t i);
  // Skips validation; for outputs of solvers that maintain the invariant.
  static Distribution trusted(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<double>& vector() const noexcept { return weights_; }

  // Every component >= delta (up to tol).
  bool in_truncated(double delta, double tol = 1e-12) const noexcept;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  struct Unchecked {};
  Distribution(std::vector<double> weights, Unchecked) : weights_(std::move(weights)) {}

  std::vector<double> weights_;
};

// The probability floor delta of the truncated simplex over d arms.
struct TruncationLevel {
  // Throws DomainError unless d >= 1 and 0 <= delta <= 1/d.
  TruncationLevel(double delta, std::size_t d);

  double delta;
  std::size_t d;
};

// (1/(q(1-q))) (sum_i x_i^q - 1), the Tsallis entropy scaled by 1/q.
double tsallis_entropy(double q, const Distribution& x);

// Bregman divergence of the negative scaled Tsallis entropy. Terms with
// x_i = y_i = 0 contribute 0; y_i = 0 < x_i throws SingularInputError.
double beta_divergence(double q, const Distribution& x, const Distribution& y);

// e_i^delta = (1 - delta d) e_i + delta 1.
Distribution mix_with_uniform(std::size_t i, const TruncationLevel& trunc);

// sigma = sqrt(T) d^(1/4) / sqrt(2).
double problem_scale(double T, double d);

// argmin over the truncated simplex of beta_divergence(1/2, x, y).
Distribution bregman_project_truncated(const Distribution& y, const TruncationLevel& trunc);

struct MirrorStepStats {
  double lambda = 0.0;  // normalisation multiplier at the solution
  double residual = 0.0;
  int iterations = 0;
};

// Solves argmin_{x >= delta, sum x = 1} <scaled_loss, x> + D_q(x, prev).
//
// Stationarity gives x_i(l) = max(delta, ((1-q)(w_i + l))^(-1/(1-q))) with
// w_i = scaled_loss_i + prev_i^(q-1)/(1-q). sum_i x_i(l) is convex and
// decreasing in l, so Newton started left of the root climbs monotonically
// onto it; a bisection bracket catches rounding overshoot.
//
// `lambda_hint` warm-starts the search when it lies left of the root.
// Throws NumericalError if |sum - 1| > 1e-12 after 200 iterations.
MirrorStepStats tsallis_mirror_step(double q, std::span<const double> prev,
                                    std::span<const double> scaled_loss, double delta,
                                    std::span<double> out, double lambda_hint = 0.0,
                                    bool use_hint = false);

}  // namespace metainf
