#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "metainf/rng.hpp"
#include "metainf/simplex.hpp"

namespace metainf {

// Loss table f_{t,i} of one episode (rows are rounds), fixed before play.
class EpisodeLosses {
 public:
  // Throws DomainError if any loss leaves [0,1] or the shape is inconsistent.
  EpisodeLosses(std::size_t T, std::size_t d, std::vector<double> losses,
                std::size_t true_best_arm);

  std::size_t rounds() const noexcept { return T_; }
  std::size_t arms() const noexcept { return d_; }
  std::size_t true_best_arm() const noexcept { return best_; }

  double loss(std::size_t t, std::size_t i) const { return losses_[t * d_ + i]; }
  std::span<const double> round(std::size_t t) const {
    return std::span<const double>(losses_).subspan(t * d_, d_);
  }
  // (1/T) sum_t f_{t,i}.
  double mean_loss(std::size_t i) const;
  // Def.-1 best arm recomputed from the table (lowest index on ties).
  std::size_t argmin_cumulative() const;

 private:
  std::size_t T_;
  std::size_t d_;
  std::vector<double> losses_;
  std::size_t best_;
};

struct Prior {
  Distribution weights;
};

// Best-arm mean mu*, gap and noise amplitude of a generated episode.
struct GapSettings {
  // Throws DomainError unless 0 < gap <= 0.6, 0 < base_loss < 1,
  // noise_amp >= 0, base_loss - noise_amp >= 0, base_loss + gap + noise_amp <= 1.
  GapSettings(double gap, double base_loss, double noise_amp);
  // mu* = 0.3 and noise_amp = min(0.25, mu*, 1 - mu* - gap).
  static GapSettings with_defaults(double gap, double base_loss = 0.3);

  double gap;
  double base_loss;
  double noise_amp;
};

// (1-zeta)/k on the first k arms, zeta/(d-k) on the rest.
Prior few_good_arms_prior(std::size_t k, double zeta, std::size_t d);

std::vector<std::size_t> sample_best_arm_sequence(const Prior& prior, std::size_t S, Rng& rng);

// Antithetic construction: rounds are paired (2k, 2k+1) and each arm gets
// mean + u, mean - u with an independent u per pair and arm. The best arm's
// mean is mu*, every other arm's mean is mu* + gap. With T odd the final
// round carries no noise.
EpisodeLosses gen_episode_losses(std::size_t best, const GapSettings& gaps, std::size_t T,
                                 std::size_t d, Rng& rng);

Distribution empirical_best_arm_distribution(std::span<const std::size_t> best_arms,
                                             std::size_t d);

// True iff every non-best arm's mean loss exceeds the best arm's by gap - 1e-12.
bool verify_gap(const EpisodeLosses& ep, double gap);

enum class PriorKind { kUniform, kFewGoodArms, kFixedSequence };

// Scenario block of an experiment: how best arms are chosen and how each
// episode's losses are generated. Losses depend only on (cell seed, episode).
struct Scenario {
  PriorKind prior_kind = PriorKind::kUniform;
  std::size_t k = 1;
  double zeta = 0.1;
  std::vector<std::size_t> fixed_sequence;  // cycled when shorter than S
  double gap = 0.5;
  double base_loss = 0.3;
  std::optional<double> noise_amp;  // default per GapSettings::with_defaults

  GapSettings gap_settings() const;
  Prior prior(std::size_t d) const;
  std::vector<std::size_t> best_arms(std::size_t S, std::size_t d, std::uint64_t cell_seed) const;
  EpisodeLosses episode(std::size_t s, std::size_t best, std::size_t T, std::size_t d,
                        std::uint64_t cell_seed) const;
};

}  // namespace metainf
