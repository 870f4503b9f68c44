#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metainf/adversaries.hpp"
#include "metainf/simplex.hpp"

namespace metainf {

// Terms of the total-regret bound, evaluated at the minimising v.
struct BoundBreakdown {
  double u_expl = 0.0;         // per-episode exploration cost delta T (d-1)
  double u_lr_slope = 0.0;     // S sigma; U_lr(v) = min(alpha^2/v, alpha) * u_lr_slope + u_lr_log
  double u_lr_log = 0.0;       // sqrt2 sigma (1 + ln(S+1)) / (alpha^2 (1-d eps)^(3/2) delta^(3/4))
  double u_lr = 0.0;           // U_lr(v_star)
  double u_init = 0.0;         // 4 sqrt2 sqrt(d/delta) (ln S + 1)
  double u_psi = 0.0;          // 6 S d eps / sqrt(delta)
  double entropy_term = 0.0;   // H_{1/2}(psi) S
  double v_star = 0.0;
  double bound_value = 0.0;
};

// Outcome of one algorithm on one seed.
struct RegretReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<double> per_episode_regret;
  double total_regret = 0.0;
  std::vector<std::uint8_t> identification_correct;
  std::vector<double> chosen_eta;
  std::vector<std::size_t> true_best_arm;
  std::vector<std::size_t> est_best_arm;
  std::optional<Distribution> psi;      // empirical distribution of true best arms
  std::optional<Distribution> psi_hat;  // same for the estimated best arms
  std::optional<Distribution> last_init;  // initialisation used in the final episode
  std::optional<BoundBreakdown> bound;
  // Closed-form bound of a baseline, when it has one.
  std::optional<double> reference_bound;
  // Per-round decisions, flattened as (episode, round, arm), when recorded.
  std::vector<double> decisions;
};

// Episodes of one (scenario, cell seed) pair. Every algorithm run on the same
// stream sees bit-identical losses and best arms.
class EpisodeStream {
 public:
  EpisodeStream(Scenario scenario, std::size_t S, std::size_t T, std::size_t d,
                std::uint64_t cell_seed);

  std::size_t episodes() const noexcept { return S_; }
  std::size_t rounds() const noexcept { return T_; }
  std::size_t arms() const noexcept { return d_; }
  std::uint64_t cell_seed() const noexcept { return seed_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<std::size_t>& best_arms() const noexcept { return best_; }

  EpisodeLosses episode(std::size_t s) const;

 private:
  Scenario scenario_;
  std::size_t S_, T_, d_;
  std::uint64_t seed_;
  std::vector<std::size_t> best_;
};

// Fills total_regret, psi and psi_hat from the per-episode vectors.
void finalize_report(RegretReport& report, std::size_t d);

}  // namespace metainf
