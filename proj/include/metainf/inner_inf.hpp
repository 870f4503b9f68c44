#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "metainf/rng.hpp"
#include "metainf/simplex.hpp"

namespace metainf {

class EpisodeLosses;

// Hyperparameters of one inner episode.
struct InnerParams {
  // Throws DomainError if phi leaves the truncated simplex or eta <= 0.
  InnerParams(Distribution phi, double eta, TruncationLevel trunc);

  Distribution phi;
  double eta;
  TruncationLevel trunc;
};

struct InnerState {
  explicit InnerState(const Distribution& phi)
      : x(phi.vector()), cum_est_loss(phi.size(), 0.0) {}

  std::vector<double> x;             // current decision point
  std::vector<double> cum_est_loss;  // running sum of importance-weighted losses
  std::size_t t = 0;
  double lambda = 0.0;  // normaliser of the last update
};

struct EpisodeResult {
  std::vector<std::size_t> plays;
  double incurred_loss = 0.0;
  std::size_t est_best_arm = 0;
  std::size_t true_best_arm = 0;
  std::optional<std::vector<Distribution>> per_round_decisions;
};

// Draws i with probability x_i by inverse-CDF on one uniform draw.
std::size_t sample_arm(std::span<const double> x, Rng& rng);
inline std::size_t sample_arm(const InnerState& state, Rng& rng) {
  return sample_arm(state.x, rng);
}

// Importance-weighted estimate: only the played coordinate is nonzero.
// Throws SingularInputError if x[played] == 0.
std::vector<double> estimate_loss(std::size_t played, double observed_loss,
                                  std::span<const double> x);

// argmin over the truncated simplex of eta <g, x> + D_{1/2}(x, x_t).
Distribution omd_update(const Distribution& x_t, std::span<const double> g, double eta,
                        const TruncationLevel& trunc);

// argmin with ties broken towards the lowest index.
std::size_t estimate_best_arm(std::span<const double> cum_est_loss);

// INF with Tsallis parameter q on the truncated simplex. Only ever sees the
// loss of the arm it played.
class InfLearner {
 public:
  InfLearner(const Distribution& phi, double eta, double delta, double q = 0.5);

  std::size_t choose(Rng& rng);
  // Feeds the loss of the arm returned by the last choose().
  void observe(double loss);

  std::span<const double> decision() const noexcept { return state_.x; }
  const InnerState& state() const noexcept { return state_; }
  std::size_t best_arm() const { return estimate_best_arm(state_.cum_est_loss); }

 private:
  InnerState state_;
  double eta_;
  double delta_;
  double q_;
  std::size_t last_play_ = 0;
  std::vector<double> scaled_;
  std::vector<double> next_;
};

// One full episode: T rounds of sample / observe / estimate / update, then
// best-arm estimation.
EpisodeResult run_episode(const EpisodeLosses& losses, const InnerParams& params, Rng& rng,
                          bool record_decisions = false);

}  // namespace metainf
